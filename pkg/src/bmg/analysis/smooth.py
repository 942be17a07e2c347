"""Smooth loci from stalks and from edge counts, and the self-duality test."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..engine import BMSheaf, braden_macpherson, global_sections_polynomial
from ..graph import MomentGraph, gkm_check
from ..scalars import CoeffSpec

__all__ = ["SmoothLocusReport", "Refusal", "smooth_locus", "self_duality_check", "is_palindromic", "SelfDualityReport"]


class Refusal(ValueError):
    """A computation whose hypotheses fail; ``reason`` is JSON-ready."""

    def __init__(self, reason: dict):
        self.reason = reason
        super().__init__(reason.get("message", "refused"))


@dataclass
class SmoothLocusReport:
    method: str
    top: str
    coeff: str
    stalks: list | None = None
    edges: list | None = None
    symmetric_difference: list | None = None
    l: int | None = None

    def vertex_set(self):
        return set(self.stalks if self.stalks is not None else self.edges)

    def to_json(self) -> dict:
        out = {"method": self.method, "top": self.top, "coeff": self.coeff}
        for key in ("stalks", "edges", "symmetric_difference", "l"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


@dataclass
class SelfDualityReport:
    ok: bool
    l: int
    polynomial: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, "l": self.l, "polynomial": {str(k): v for k, v in sorted(self.polynomial.items())}}


def is_palindromic(P: dict, l: int) -> bool:
    """q^l P(1/q) == P(q)."""
    clean = {k: v for k, v in P.items() if v}
    return clean == {l - k: v for k, v in clean.items()}


def self_duality_check(S: BMSheaf, l: int) -> SelfDualityReport:
    P = global_sections_polynomial(S)
    return SelfDualityReport(is_palindromic(P, l), l, P)


def _stalk_locus(S: BMSheaf, verts) -> list:
    return sorted(x for x in verts if S.stalks[x].ngens == 1)


def _edge_locus(G: MomentGraph, verts, l: int) -> list:
    vs = set(verts)
    count = {y: sum(1 for e in G.edges_at(y) if e.other(y) in vs) for y in vs}
    out = []
    for x in vs:
        if all(count[y] == l for y in G.up_set(x).members if y in vs):
            out.append(x)
    return sorted(out)


def smooth_locus(G: MomentGraph, k: CoeffSpec, w: str, method: str = "stalks", l: int | None = None,
                 sheaf: BMSheaf | None = None) -> SmoothLocusReport:
    """Vertices x <= w where B(w) has rank one (``stalks``) or where every
    y in [x, w] meets exactly l edges inside {<= w} (``edges``)."""
    verts = sorted(G.down_set(w).members)
    if l is None:
        l = G.height(w)
    rep = SmoothLocusReport(method, w, k.flag())
    if method in ("edges", "compare"):
        rep.l = l
    if method == "compare":
        H = G.induced(verts)
        gk = gkm_check(H, k)
        if not gk.ok:
            v = gk.violations[0]
            raise Refusal({"message": "not a GKM pair", "coeff": k.flag(), "violation": v})
    if method in ("stalks", "compare"):
        if sheaf is None:
            sheaf = braden_macpherson(G, k, w)
        if method == "compare":
            sd = self_duality_check(sheaf, l)
            if not sd.ok:
                raise Refusal({"message": "global sections are not self-dual of the given degree", **sd.to_json()})
        rep.stalks = _stalk_locus(sheaf, verts)
    if method in ("edges", "compare"):
        rep.edges = _edge_locus(G, verts, l)
    if method == "compare":
        rep.symmetric_difference = sorted(set(rep.stalks) ^ set(rep.edges))
    if method not in ("stalks", "edges", "compare"):
        raise ValueError(f"unknown method {method!r}")
    return rep
