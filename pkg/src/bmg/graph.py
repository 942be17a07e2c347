"""Directed moment graphs: validation, order queries and GKM diagnostics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

from .lattice import Lattice, Weight, embed_weight, primitive_mod_p, proportional_over_k, sign_normalize
from .scalars import CoeffSpec

__all__ = [
    "Edge",
    "MomentGraph",
    "VertexSet",
    "GraphValidationError",
    "ValidationReport",
    "GKMReport",
    "validate",
    "order_queries",
    "gkm_check",
    "a4b_check",
]


class GraphValidationError(ValueError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(p["kind"] for p in report.problems))


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    label: Weight

    @property
    def id(self) -> str:
        return f"{self.tail}->{self.head}"

    def other(self, v: str) -> str:
        return self.head if v == self.tail else self.tail


@dataclass
class ValidationReport:
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def kinds(self) -> set:
        return {p["kind"] for p in self.problems}

    def to_json(self) -> dict:
        return {"ok": self.ok, "problems": self.problems}


@dataclass
class GKMReport:
    coeff: str
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"coeff": self.coeff, "ok": self.ok, "violations": self.violations}


def _check(lattice_rank, vertices, edges) -> ValidationReport:
    rep = ValidationReport()
    vset = set(vertices)
    if len(vset) != len(vertices):
        rep.problems.append({"kind": "duplicate vertex"})
    seen: dict = {}
    for e in edges:
        for v in (e.tail, e.head):
            if v not in vset:
                rep.problems.append({"kind": "unknown vertex", "vertex": v, "edge": e.id})
        if e.tail == e.head:
            rep.problems.append({"kind": "loop", "edge": e.id})
        if len(e.label) != lattice_rank:
            rep.problems.append({"kind": "rank mismatch", "edge": e.id, "label": list(e.label.coords)})
        elif e.label.is_zero():
            rep.problems.append({"kind": "zero label", "edge": e.id})
        pair = frozenset((e.tail, e.head))
        if pair in seen:
            rep.problems.append({"kind": "multiple edges", "vertices": sorted(pair), "edges": [seen[pair], e.id]})
        else:
            seen[pair] = e.id
    if rep.problems:
        return rep
    # directed cycles, by iterative DFS colouring
    succ: dict = {v: [] for v in vertices}
    for e in edges:
        succ[e.tail].append(e.head)
    colour = {v: 0 for v in vertices}
    for root in vertices:
        if colour[root]:
            continue
        stack = [(root, iter(succ[root]))]
        colour[root] = 1
        path = [root]
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[v] = 2
                stack.pop()
                path.pop()
            elif colour[nxt] == 1:
                cyc = path[path.index(nxt):] + [nxt]
                rep.problems.append({"kind": "directed cycle", "vertices": cyc})
                return rep
            elif colour[nxt] == 0:
                colour[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(succ[nxt])))
    return rep


class MomentGraph:
    """Finite directed moment graph; the order is generated by tail < head."""

    def __init__(self, lattice: Lattice | int, vertices, edges, check: bool = True):
        if isinstance(lattice, int):
            lattice = Lattice(lattice)
        self.lattice = lattice
        self.vertices = tuple(str(v) for v in vertices)
        self.edges = tuple(
            e if isinstance(e, Edge) else Edge(str(e[0]), str(e[1]), e[2] if isinstance(e[2], Weight) else Weight(tuple(e[2])))
            for e in edges
        )
        self.report = _check(lattice.rank, self.vertices, self.edges)
        if check and not self.report.ok:
            raise GraphValidationError(self.report)
        self.edge_by_id = {e.id: e for e in self.edges}
        self._incident: dict = {v: [] for v in self.vertices}
        for e in self.edges:
            if e.tail in self._incident:
                self._incident[e.tail].append(e)
            if e.head in self._incident and e.head != e.tail:
                self._incident[e.head].append(e)
        self._up = None
        self._down = None
        self._index = {v: i for i, v in enumerate(self.vertices)}

    @property
    def rank(self) -> int:
        return self.lattice.rank

    # --- incidence --------------------------------------------------------

    def edges_at(self, x: str) -> list[Edge]:
        return list(self._incident[x])

    def upward_edges(self, x: str) -> list[Edge]:
        """Edges x -> y (x is the smaller end)."""
        return [e for e in self._incident[x] if e.tail == x]

    def downward_edges(self, x: str) -> list[Edge]:
        return [e for e in self._incident[x] if e.head == x]

    def edge_between(self, x: str, y: str) -> Edge | None:
        for e in self._incident[x]:
            if e.other(x) == y:
                return e
        return None

    # --- order ------------------------------------------------------------

    def _closure(self):
        if self._up is not None:
            return
        if not self.report.ok:
            raise GraphValidationError(self.report)
        up = {}
        # maximal vertices come first, so every head is done before its tails
        for v in self.linear_extension():
            s = {v}
            for e in self.upward_edges(v):
                s |= up[e.head]
            up[v] = frozenset(s)
        down = {v: set() for v in self.vertices}
        for v, s in up.items():
            for y in s:
                down[y].add(v)
        self._up = up
        self._down = {v: frozenset(s) for v, s in down.items()}

    def leq(self, x: str, y: str) -> bool:
        self._closure()
        return y in self._up[x]

    def up_set(self, x: str) -> "VertexSet":
        self._closure()
        return VertexSet(self, self._up[x])

    def down_set(self, x: str) -> "VertexSet":
        self._closure()
        return VertexSet(self, self._down[x])

    def linear_extension(self) -> list[str]:
        """Vertices maximal first; among available vertices the smallest id wins."""
        import heapq

        outdeg = {v: 0 for v in self.vertices}
        for e in self.edges:
            outdeg[e.tail] += 1
        heap = [v for v in self.vertices if outdeg[v] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            v = heapq.heappop(heap)
            out.append(v)
            for e in self.downward_edges(v):
                outdeg[e.tail] -= 1
                if outdeg[e.tail] == 0:
                    heapq.heappush(heap, e.tail)
        if len(out) != len(self.vertices):
            raise GraphValidationError(self.report)
        return out

    def covers(self, x: str | None = None) -> list:
        """Upper covers of ``x``, or all cover pairs (x, y) when x is None."""
        self._closure()

        def ups(v):
            above = self._up[v] - {v}
            return sorted(y for y in above if not any(z != y and y in self._up[z] for z in above))

        if x is not None:
            return ups(x)
        return [(v, y) for v in self.vertices for y in ups(v)]

    def height(self, top: str) -> int:
        """Length of the longest chain ending at ``top``."""
        self._closure()
        h = {}
        for v in reversed(self.linear_extension()):
            h[v] = max((h[e.tail] + 1 for e in self.downward_edges(v)), default=0)
        return h[top]

    def induced(self, vs) -> "MomentGraph":
        vs = set(vs)
        verts = [v for v in self.vertices if v in vs]
        edges = [e for e in self.edges if e.tail in vs and e.head in vs]
        return MomentGraph(self.lattice, verts, edges)

    # --- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "lattice_rank": self.rank,
            "vertices": list(self.vertices),
            "edges": [{"tail": e.tail, "head": e.head, "label": list(e.label.coords)} for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict, check: bool = True) -> "MomentGraph":
        r = int(data["lattice_rank"])
        edges = [(e["tail"], e["head"], sign_normalize(Weight(tuple(e["label"])))) for e in data["edges"]]
        return cls(Lattice(r), data["vertices"], edges, check=check)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def __eq__(self, other):
        return isinstance(other, MomentGraph) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.dumps())

    def __repr__(self):
        return f"MomentGraph(rank={self.rank}, vertices={len(self.vertices)}, edges={len(self.edges)})"


class VertexSet:
    """A set of vertices of a fixed graph."""

    def __init__(self, graph: MomentGraph, members):
        self.graph = graph
        self.members = frozenset(members)
        unknown = self.members - set(graph.vertices)
        if unknown:
            raise ValueError(f"unknown vertices {sorted(unknown)}")
        self._open = None
        self._closed = None

    @property
    def is_open(self) -> bool:
        if self._open is None:
            self._open = all(self.graph.up_set(v).members <= self.members for v in self.members)
        return self._open

    @property
    def is_closed(self) -> bool:
        if self._closed is None:
            self._closed = all(self.graph.down_set(v).members <= self.members for v in self.members)
        return self._closed

    def __contains__(self, v):
        return v in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        if isinstance(other, VertexSet):
            return self.members == other.members
        return self.members == frozenset(other)

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return f"VertexSet({sorted(self.members)})"


def validate(G: MomentGraph) -> ValidationReport:
    return G.report


def order_queries(G: MomentGraph, kind: str, x: str | None = None):
    if kind == "up_set":
        return G.up_set(x)
    if kind == "down_set":
        return G.down_set(x)
    if kind == "linear_extension":
        return G.linear_extension()
    if kind == "covers":
        return G.covers(x)
    raise ValueError(f"unknown order query {kind!r}")


def gkm_check(G: MomentGraph, k: CoeffSpec) -> GKMReport:
    rep = GKMReport(k.flag())
    for e in G.edges:
        if embed_weight(e.label, k).is_zero():
            rep.violations.append({"kind": "zero label", "edge": e.id, "label": list(e.label.coords)})
    for v in G.vertices:
        for e1, e2 in combinations(G.edges_at(v), 2):
            if proportional_over_k(e1.label, e2.label, k):
                rep.violations.append({
                    "kind": "proportional labels",
                    "vertex": v,
                    "edges": [e1.id, e2.id],
                    "labels": [list(e1.label.coords), list(e2.label.coords)],
                })
    return rep


def a4b_check(G: MomentGraph, p: int) -> GKMReport:
    rep = GKMReport(f"A4b:{p}")
    for e in G.edges:
        if not primitive_mod_p(e.label, p):
            rep.violations.append({"kind": "label not primitive", "edge": e.id, "label": list(e.label.coords)})
    return rep
