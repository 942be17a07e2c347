"""Tilting characters from BM sheaves on the affine Grassmannian."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..builders import RootSystemData, affine_grassmannian_graph, coweight_id, coweight_length, parse_coweight_id, _as_cartan
from ..engine import braden_macpherson
from ..scalars import PLocalIntegers
from .smooth import Refusal

__all__ = ["CharacterTable", "tilting_character", "sl2_tilting_oracle"]


@dataclass
class CharacterTable:
    """weight (fundamental coordinates) -> multiplicity."""

    mult: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {coweight_id(m): n for m, n in sorted(self.mult.items())}

    def to_tsv(self) -> str:
        return "weight\tmultiplicity\n" + "".join(f"{coweight_id(m)}\t{n}\n" for m, n in sorted(self.mult.items()))


def tilting_character(A, lam, p: int, force: bool = False, jobs: int = 1) -> CharacterTable:
    """Weight multiplicities of the tilting module T(lam) in characteristic p.

    The weights of G are the coweights of the dual group, so the
    Grassmannian is built from the transposed Cartan matrix.  Each weight
    mu <= lam is a vertex and its multiplicity is the total rank of
    B(lam)^mu over Z_(p).
    """
    A = _as_cartan(A)
    dual = A.transpose()
    R = RootSystemData(dual)
    h = R.coxeter_number
    if p <= h + 1 and not force:
        raise Refusal({"message": "need p > h + 1", "p": p, "h": h})
    lam = tuple(int(c) for c in (lam if not isinstance(lam, int) else (lam,)))
    if len(lam) != A.size or any(c < 0 for c in lam):
        raise ValueError("lambda must be a dominant weight in fundamental coordinates")
    cutoff = coweight_length(R, lam)
    G = affine_grassmannian_graph(dual, cutoff, component=lam)
    S = braden_macpherson(G, PLocalIntegers(p), coweight_id(lam), jobs=jobs)
    table = CharacterTable()
    for x in S.support():
        table.mult[parse_coweight_id(x)] = S.stalks[x].ngens
    return table


def sl2_tilting_oracle(lam: int, p: int) -> dict:
    """Classical SL2 tilting characters for 0 <= lam <= 2p - 2, as {weight: multiplicity}."""

    def chi(n):
        return {n - 2 * i: 1 for i in range(n + 1)} if n >= 0 else {}

    if lam < 0 or lam > 2 * p - 2:
        raise ValueError("oracle covers 0 <= lam <= 2p - 2")
    out = dict(chi(lam))
    if lam >= p:
        for m, n in chi(2 * p - 2 - lam).items():
            out[m] = out.get(m, 0) + n
    return out
