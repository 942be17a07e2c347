"""Braden-MacPherson sheaves on moment graphs.

The construction runs top-down.  Besides the sheaf itself it maintains a
set of homogeneous generators of the sections over the processed (open)
set of vertices.  Restriction of sections to an open subset is onto for a
BM sheaf, so the image of these generators under u_x generates B^{delta x};
no kernel over the whole up-set has to be formed.  Each generator is then
extended to x by solving d_x(m) = u_x(g), and the sections supported at x
(the kernel of d_x) contribute new generators.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import linalg
from .graded import (
    DegreewiseModule,
    FreeGradedModule,
    GradedMap,
    cover_map,
    degreewise_kernel,
    direct_sum,
    expand_free,
    generated_submodule,
    minimal_generators,
    quotient_by_linear_form,
)
from .graph import MomentGraph, VertexSet
from .lattice import GradedPolynomial, embed_weight, monomial_basis, monomial_index
from .scalars import CoeffSpec, parse_coeff

__all__ = [
    "BMSheaf",
    "SectionModule",
    "AxiomReport",
    "StructureAlgebra",
    "braden_macpherson",
    "default_window",
    "sections",
    "costalk",
    "verify_bm_axioms",
    "structure_algebra",
    "decompose",
    "shift_sheaf",
    "direct_sum_sheaves",
    "global_sections_polynomial",
    "global_sections_hilbert",
    "rank_table",
]


def default_window(G: MomentGraph, top: str) -> tuple[int, int]:
    return (0, 2 * G.height(top) + 4)


class BMSheaf:
    """A k-sheaf on a moment graph with free stalks.

    ``rho[(x, eid)]`` lists, for each generator of the stalk at x, its image
    in the edge module at the generator's degree.  Edge modules default to
    zero; stalks default to zero.
    """

    def __init__(self, graph: MomentGraph, coeff: CoeffSpec, window, stalks=None, edge_modules=None, rho=None, top=None):
        self.graph = graph
        self.coeff = coeff
        self.window = tuple(window)
        self.top = top
        r = graph.rank
        self.stalks = {v: FreeGradedModule(coeff, r, ()) for v in graph.vertices}
        self.stalks.update(stalks or {})
        self.edge_modules = dict(edge_modules or {})
        self.rho = dict(rho or {})
        self._expanded: dict = {}
        self._rho_maps: dict = {}
        self.costalk_degrees = None  # filled by the construction: generators of ker d_x
        self.costalk_dims = None

    # --- accessors ----------------------------------------------------------

    def stalk(self, x: str) -> FreeGradedModule:
        return self.stalks[x]

    def stalk_module(self, x: str) -> DegreewiseModule:
        M = self._expanded.get(x)
        if M is None:
            M = expand_free(self.stalks[x], self.window)
            self._expanded[x] = M
        return M

    def edge_module(self, eid: str) -> DegreewiseModule:
        M = self.edge_modules.get(eid)
        if M is None:
            M = DegreewiseModule.zero(self.coeff, self.graph.rank, self.window)
            self.edge_modules[eid] = M
        return M

    def rho_images(self, x: str, eid: str) -> list:
        imgs = self.rho.get((x, eid))
        if imgs is None:
            E = self.edge_module(eid)
            imgs = [[self.coeff.zero()] * E.dim(d) for d in self.stalks[x].degrees]
        return imgs

    def rho_map(self, x: str, eid: str) -> GradedMap:
        key = (x, eid)
        f = self._rho_maps.get(key)
        if f is None:
            F = self.stalks[x]
            E = self.edge_module(eid)
            f = cover_map(F, E, self.rho_images(x, eid), src=self.stalk_module(x))
            self._rho_maps[key] = f
        return f

    def nonzero_edges(self, x: str, direction: str = "all"):
        G = self.graph
        es = {"up": G.upward_edges, "down": G.downward_edges, "all": G.edges_at}[direction](x)
        return [e for e in es if not self.edge_module(e.id).is_zero()]

    def graded_ranks(self) -> dict:
        return {x: F.graded_rank() for x, F in self.stalks.items()}

    def support(self) -> list:
        return [x for x in self.graph.vertices if not self.stalks[x].is_zero()]

    # --- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        k = self.coeff
        stalks = {x: list(F.degrees) for x, F in sorted(self.stalks.items())}
        edges, mods, rho = {}, {}, {}
        for e in self.graph.edges:
            M = self.edge_module(e.id)
            edges[e.id] = {str(d): n for d, n in M.dims.items() if n}
            if not M.is_zero():
                mods[e.id] = M.to_json()
                rho[e.id] = {
                    end: [[k.to_str(c) for c in v] for v in self.rho_images(x, e.id)]
                    for end, x in (("tail", e.tail), ("head", e.head))
                }
        return {
            "format": "bmg-sheaf-1",
            "top": self.top,
            "coeff": k.flag(),
            "window": list(self.window),
            "graph": self.graph.to_json(),
            "stalks": stalks,
            "edges": edges,
            "edge_modules": mods,
            "rho": rho,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def content_hash(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()

    @classmethod
    def from_json(cls, data: dict) -> "BMSheaf":
        k = parse_coeff(data["coeff"])
        G = MomentGraph.from_json(data["graph"])
        window = tuple(data["window"])
        r = G.rank
        stalks = {x: FreeGradedModule(k, r, tuple(ds)) for x, ds in data["stalks"].items()}
        mods = {eid: DegreewiseModule.from_json(k, r, window, m) for eid, m in data["edge_modules"].items()}
        rho = {}
        for eid, ends in data["rho"].items():
            e = G.edge_by_id[eid]
            rho[(e.tail, eid)] = [[k.from_str(c) for c in v] for v in ends["tail"]]
            rho[(e.head, eid)] = [[k.from_str(c) for c in v] for v in ends["head"]]
        return cls(G, k, window, stalks, mods, rho, top=data.get("top"))

    def __repr__(self):
        return f"BMSheaf(top={self.top}, coeff={self.coeff.flag()}, window={self.window})"


# --- the per-vertex step ---------------------------------------------------------


def _to_ambient(sub: DegreewiseModule, d: int, coords: list) -> list:
    k = sub.coeff
    basis = sub.ambient_bases[d]
    n = len(basis[0]) if basis else 0
    out = [k.zero()] * n
    for c, b in zip(coords, basis):
        if c:
            linalg._axpy(k, out, k.neg(c), b)
    return out


def _solvers(dmap: GradedMap) -> dict:
    cache: dict = {}

    def get(d):
        s = cache.get(d)
        if s is None:
            s = linalg.Solver(dmap.mats[d], dmap.source.coeff, dmap.source.dim(d))
            cache[d] = s
        return s

    return get


def _vertex_step(coeff, rank, window, D, uvecs, is_top, audit):
    """Stalk, d_x, lifts and new section generators at one vertex.

    ``D`` is the direct sum of the upward edge modules (None if there are
    none) and ``uvecs`` the images u_x(g) of the current section generators.
    Returns ``(degrees, images, lifts, kernel_gens, kernel_dims)`` with
    images/lifts in D- and stalk-coordinates respectively.
    """
    lo, hi = window
    if D is None:
        if not is_top:
            return (), [], [None] * len(uvecs), [], {}
        if not lo <= 0 <= hi:
            raise ValueError("window must contain degree 0")
        F = FreeGradedModule(coeff, rank, (0,))
        return (0,), [], [None] * len(uvecs), [(0, [coeff.one()])], expand_free(F, window).dims
    I, _ = generated_submodule(D, [(d, u) for d, u in uvecs])
    gens = minimal_generators(I, audit=audit)
    degrees = tuple(d for d, _ in gens)
    images = [_to_ambient(I, d, v) for d, v in gens]
    F = FreeGradedModule(coeff, rank, degrees)
    dD = cover_map(F, D, images)
    solver = _solvers(dD)
    lifts = []
    for d, u in uvecs:
        m = solver(d).solve(u)
        if m is None:
            raise ArithmeticError("section does not extend: image of d_x misses B^{delta x}")
        lifts.append(m)
    K, _ = degreewise_kernel(dD)
    kg = [(d, _to_ambient(K, d, v)) for d, v in minimal_generators(K)]
    return degrees, images, lifts, kg, K.dims


def _vertex_task(args):
    return _vertex_step(*args)


class _Sweep:
    """Section generators over the processed open set, as (degree, {vertex: vector})."""

    def __init__(self, S: BMSheaf):
        self.S = S
        self.gens: list = []

    def delta(self, x: str):
        """Upward edges, their direct sum D, the nonzero vectors u_x(g) and their generator indices."""
        S = self.S
        up = S.nonzero_edges(x, "up")
        if not up:
            return up, None, [], []
        D = direct_sum([S.edge_module(e.id) for e in up])
        uvecs, idx = [], []
        for n, (d, vals) in enumerate(self.gens):
            u = []
            nz = False
            for e in up:
                v = vals.get(e.head)
                if v is None:
                    u.extend([S.coeff.zero()] * S.edge_module(e.id).dim(d))
                else:
                    w = S.rho_map(e.head, e.id).apply(d, v)
                    nz = nz or any(w)
                    u.extend(w)
            if nz:
                uvecs.append((d, u))
                idx.append(n)
        return up, D, uvecs, idx

    def extend(self, x: str, idx, lifts, kernel_gens):
        """Extend generators by their lifts at x (zero where u_x(g) = 0) and add kernel generators."""
        for n, m in zip(idx, lifts):
            if any(m):
                self.gens[n][1][x] = m
        hi = self.S.window[1]
        for d, v in kernel_gens:
            if d <= hi:
                self.gens.append((d, {x: v}))


def _split(S: BMSheaf, up, d: int, vec: list) -> dict:
    out, pos = {}, 0
    for e in up:
        n = S.edge_module(e.id).dim(d)
        out[e.id] = vec[pos:pos + n]
        pos += n
    return out


def _waves(G: MomentGraph, verts: list) -> list:
    """Group vertices into antichains: a vertex joins the wave after its highest upper neighbour."""
    vs = set(verts)
    level = {}
    for x in G.linear_extension():
        if x in vs:
            level[x] = max((level[e.head] + 1 for e in G.upward_edges(x) if e.head in vs), default=0)
    waves: dict = {}
    for x, l in level.items():
        waves.setdefault(l, []).append(x)
    return [sorted(waves[l]) for l in sorted(waves)]


def braden_macpherson(G: MomentGraph, k: CoeffSpec, w: str, window=None, order=None,
                      strategy: str = "incremental", jobs: int = 1, audit: bool = True) -> BMSheaf:
    """The indecomposable BM sheaf B(w) over k.

    ``order``: an explicit linear extension (maximal first) to process in;
    ``strategy``: "incremental" (section generators) or "upset" (sections over
    the strict up-set computed as a kernel, for cross-checking);
    ``jobs``: process antichains in parallel.
    """
    if w not in G.vertices:
        raise ValueError(f"unknown vertex {w!r}")
    if window is None:
        window = default_window(G, w)
    window = tuple(window)
    S = BMSheaf(G, k, window, top=w)
    supp = G.down_set(w).members
    if order is not None:
        order = [x for x in order if x in supp]
        pos = {x: i for i, x in enumerate(order)}
        for e in G.edges:
            if e.tail in supp and pos[e.head] > pos[e.tail]:
                raise ValueError("order is not a linear extension (maximal first)")
        waves = [[x] for x in order]
    elif jobs > 1:
        waves = _waves(G, [x for x in G.vertices if x in supp])
    else:
        waves = [[x] for x in G.linear_extension() if x in supp]
    sweep = _Sweep(S)
    S.costalk_degrees, S.costalk_dims = {}, {}
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for wave in waves:
            tasks, meta = [], []
            for x in wave:
                if strategy == "upset":
                    up, D, uvecs = _upset_delta(S, x)
                    idx = []
                elif strategy == "incremental":
                    up, D, uvecs, idx = sweep.delta(x)
                else:
                    raise ValueError(f"unknown strategy {strategy!r}")
                tasks.append((k, G.rank, window, D, uvecs, x == w, audit))
                meta.append((x, up, idx))
            if pool is not None and len(tasks) > 1:
                results = list(pool.map(_vertex_task, tasks))
            else:
                results = [_vertex_step(*t) for t in tasks]
            for (x, up, idx), (degrees, images, lifts, kg, kdims) in zip(meta, results):
                F = FreeGradedModule(k, G.rank, degrees)
                S.stalks[x] = F
                for d, img in zip(degrees, images):
                    for eid, part in _split(S, up, d, img).items():
                        S.rho.setdefault((x, eid), []).append(part)
                for e in up:
                    S.rho.setdefault((x, e.id), [])
                if strategy == "incremental":
                    sweep.extend(x, idx, lifts, kg)
                S.costalk_degrees[x] = tuple(d for d, _ in kg)
                S.costalk_dims[x] = dict(kdims)
                # step (2): edge modules below x are quotients of its stalk
                for e in G.downward_edges(x):
                    if e.tail not in supp:
                        continue
                    alpha = embed_weight(e.label, k)
                    Q, pi = quotient_by_linear_form(F, alpha, window)
                    S.edge_modules[e.id] = Q
                    cols = []
                    for g, dg in enumerate(F.degrees):
                        j = F.basis(dg).index((g, (0,) * G.rank))
                        cols.append([row[j] for row in pi.mats[dg]])
                    S.rho[(x, e.id)] = cols
    finally:
        if pool is not None:
            pool.shutdown()
    return S


def _upset_delta(S: BMSheaf, x: str):
    """B^{delta x} generators from the sections over the strict up-set (literal kernel)."""
    G = S.graph
    up = S.nonzero_edges(x, "up")
    if not up:
        return up, None, []
    U = sorted(y for y in G.up_set(x).members if y != x and not S.stalks[y].is_zero())
    sec = _sections_module(S, U)
    D = direct_sum([S.edge_module(e.id) for e in up])
    uvecs = []
    for d in sec.module.degrees():
        for b in sec.module.ambient_bases[d]:
            parts = _split_stalks(S, U, d, b)
            u = []
            for e in up:
                u.extend(S.rho_map(e.head, e.id).apply(d, parts[e.head]))
            if any(u):
                uvecs.append((d, u))
    return up, D, uvecs


# --- sections, costalks -------------------------------------------------------------


def _split_stalks(S: BMSheaf, verts, d: int, vec: list) -> dict:
    out, pos = {}, 0
    for x in verts:
        n = S.stalk_module(x).dim(d)
        out[x] = vec[pos:pos + n]
        pos += n
    return out


def _block_map(S: BMSheaf, verts, edges, src: DegreewiseModule, tgt: DegreewiseModule, signed: bool) -> GradedMap:
    """(m_x) -> (rho_{tail}(m_tail) - rho_{head}(m_head))_E; unsigned sums all incident terms."""
    k = S.coeff
    mats = {}
    for d in src.degrees():
        m = linalg.zeros(k, tgt.dim(d), src.dim(d))
        co = {}
        c = 0
        for x in verts:
            co[x] = c
            c += S.stalk_module(x).dim(d)
        r = 0
        for e in edges:
            nE = S.edge_module(e.id).dim(d)
            for x, sign in ((e.tail, 1), (e.head, -1 if signed else 1)):
                if x not in co:
                    continue
                blk = S.rho_map(x, e.id).mats[d]
                for a, row in enumerate(blk):
                    for b, val in enumerate(row):
                        if val:
                            m[r + a][co[x] + b] = val if sign > 0 else k.neg(val)
            r += nE
        mats[d] = m
    return GradedMap(src, tgt, mats, check=False)


@dataclass
class SectionModule:
    module: DegreewiseModule
    inclusion: GradedMap
    open_set: tuple

    def generator_polynomial(self) -> dict:
        out: dict = {}
        for d, _ in minimal_generators(self.module):
            out[d // 2] = out.get(d // 2, 0) + 1
        return out

    def hilbert(self) -> dict:
        return {d // 2: n for d, n in self.module.dims.items() if n}


def _sections_module(S: BMSheaf, verts) -> SectionModule:
    verts = sorted(verts)
    k, r, window = S.coeff, S.graph.rank, S.window
    vs = set(verts)
    if not verts:
        Z = DegreewiseModule.zero(k, r, window)
        Z.ambient_bases = {d: [] for d in Z.degrees()}
        Z.ambient_pivots = {d: [] for d in Z.degrees()}
        return SectionModule(Z, GradedMap(Z, Z, {}, check=False), ())
    src = direct_sum([S.stalk_module(x) for x in verts])
    inner = [e for e in S.graph.edges if e.tail in vs and e.head in vs and not S.edge_module(e.id).is_zero()]
    tgt = direct_sum([S.edge_module(e.id) for e in inner]) if inner else DegreewiseModule.zero(k, r, window)
    f = _block_map(S, verts, inner, src, tgt, signed=True)
    K, incl = degreewise_kernel(f)
    return SectionModule(K, incl, tuple(verts))


def sections(S: BMSheaf, I) -> SectionModule:
    """Gamma(I, S) for an open vertex set I (literal degreewise kernel)."""
    if not isinstance(I, VertexSet):
        I = VertexSet(S.graph, I)
    if not I.is_open:
        raise ValueError("sections are only defined here for open vertex sets")
    return _sections_module(S, I.members)


def costalk(S: BMSheaf, x: str) -> tuple[DegreewiseModule, GradedMap]:
    """{m in B^x : rho_{x,E}(m) = 0 for every edge E at x}, with its inclusion."""
    src = S.stalk_module(x)
    es = S.nonzero_edges(x, "all")
    if not es:
        tgt = DegreewiseModule.zero(S.coeff, S.graph.rank, S.window)
    else:
        tgt = direct_sum([S.edge_module(e.id) for e in es])
    k = S.coeff
    mats = {}
    for d in src.degrees():
        rows = []
        for e in es:
            rows.extend(S.rho_map(x, e.id).mats[d])
        mats[d] = rows
    f = GradedMap(src, tgt, mats, check=False)
    return degreewise_kernel(f)


# --- axioms ---------------------------------------------------------------------------


@dataclass
class AxiomReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first(self):
        return self.failures[0] if self.failures else None

    def to_json(self) -> dict:
        return {"ok": self.ok, "failures": self.failures}


def _alpha_action(M: DegreewiseModule, alpha, d: int) -> list:
    k = M.coeff
    out = linalg.zeros(k, M.dim(d + 2), M.dim(d))
    for i, a in enumerate(alpha.coords):
        if a:
            for r, row in enumerate(M.mu[(i, d)]):
                for c, x in enumerate(row):
                    if x:
                        out[r][c] = k.add(out[r][c], k.mul(a, x))
    return out


def _check_edges(S: BMSheaf, rep: AxiomReport) -> None:
    k = S.coeff
    lo, hi = S.window
    for x, F in S.stalks.items():
        if any(d < lo or d > hi for d in F.degrees):
            rep.failures.append({"axiom": 1, "vertex": x, "message": "stalk generator outside the window"})
            return
    for e in S.graph.edges:
        E = S.edge_module(e.id)
        alpha = embed_weight(e.label, k)
        for d in range(lo, hi - 1, 2):
            if any(any(r) for r in _alpha_action(E, alpha, d)):
                rep.failures.append({"axiom": 2, "edge": e.id, "degree": d, "message": "alpha(E) does not annihilate B^E"})
                return
        Fy = S.stalk_module(e.head)
        f = S.rho_map(e.head, e.id)
        for d in E.degrees():
            n = E.dim(d)
            m = f.mats[d]
            if n:
                basis, piv = linalg.image_basis(m, k, Fy.dim(d))
                if len(basis) != n or not all(k.is_unit(basis[i][c]) for i, c in enumerate(piv)):
                    rep.failures.append({"axiom": 2, "edge": e.id, "degree": d, "message": "head map not surjective"})
                    return
            ker = linalg.kernel_basis(m, k, Fy.dim(d)) if Fy.dim(d) else []
            if d - 2 >= lo:
                amul = _alpha_action(Fy, alpha, d - 2)
                ab, _ = linalg.image_basis(amul, k, Fy.dim(d - 2)) if Fy.dim(d - 2) and amul else ([], [])
            else:
                ab = []
            if ab != ker:
                rep.failures.append({"axiom": 2, "edge": e.id, "degree": d, "message": "kernel of head map is not alpha(E) B^y"})
                return


def _sweep_vertices(S: BMSheaf, visit):
    """Run the section-generator sweep over all vertices, calling visit(x, up, D, I, dD, uvecs)."""
    sweep = _Sweep(S)
    k = S.coeff
    for x in S.graph.linear_extension():
        up, D, uvecs, idx = sweep.delta(x)
        F = S.stalks[x]
        if D is None:
            res = visit(x, up, None, None, None, uvecs)
            if res is False:
                return
            kg = minimal_generators(S.stalk_module(x)) if not F.is_zero() else []
            sweep.extend(x, [], [], kg)
            continue
        I, _ = generated_submodule(D, uvecs)
        images = []
        for g, dg in enumerate(F.degrees):
            v = []
            for e in up:
                v.extend(S.rho_images(x, e.id)[g])
            images.append(v)
        dD = cover_map(F, D, images, src=S.stalk_module(x))
        res = visit(x, up, D, I, dD, uvecs)
        if res is False:
            return
        solver = _solvers(dD)
        lifts = [solver(d).solve(u) for d, u in uvecs]
        if any(m is None for m in lifts):
            raise ValueError(f"not a BM sheaf: sections over the up-set of {x} do not lift")
        K, _ = degreewise_kernel(dD)
        kg = [(d, _to_ambient(K, d, v)) for d, v in minimal_generators(K)]
        sweep.extend(x, idx, lifts, kg)


def verify_bm_axioms(S: BMSheaf) -> AxiomReport:
    """Check the four BM conditions; stops at the first failure."""
    rep = AxiomReport()
    _check_edges(S, rep)
    if not rep.ok:
        return rep
    k = S.coeff

    def visit(x, up, D, I, dD, uvecs):
        F = S.stalks[x]
        if D is None:
            return True
        for g, dg in enumerate(F.degrees):
            v = [row[F.basis(dg).index((g, (0,) * S.graph.rank))] for row in dD.mats[dg]]
            if linalg.coordinates(I.ambient_bases[dg], I.ambient_pivots[dg], v, k) is None:
                rep.failures.append({"axiom": 4, "vertex": x, "degree": dg,
                                     "message": "image of d_x is not contained in B^{delta x}"})
                return False
        solver = _solvers(dD)
        for d, u in uvecs:
            if solver(d).solve(u) is None:
                rep.failures.append({"axiom": 3, "vertex": x, "degree": d,
                                     "message": "image of d_x does not contain B^{delta x}"})
                return False
        return True

    _sweep_vertices(S, visit)
    return rep


# --- global sections ------------------------------------------------------------------


def global_sections_polynomial(S: BMSheaf, method: str = "filtration") -> dict:
    """Generator polynomial of Gamma(S).

    ``filtration`` adds up the generators of the sections supported at each
    vertex (valid when these are free, which is checked); ``literal``
    computes minimal generators of the kernel over all vertices.
    """
    if method == "literal":
        return sections(S, S.graph.vertices).generator_polynomial()
    degs, dims = S.costalk_degrees, S.costalk_dims
    if degs is None:
        sweep_degs = {}
        sweep_dims = {}

        def collect(x, up, D, I, dD, uvecs):
            if dD is None:
                M = S.stalk_module(x)
                sweep_degs[x] = tuple(d for d, _ in minimal_generators(M)) if not S.stalks[x].is_zero() else ()
                sweep_dims[x] = dict(M.dims)
            else:
                K, _ = degreewise_kernel(dD)
                sweep_degs[x] = tuple(d for d, _ in minimal_generators(K))
                sweep_dims[x] = dict(K.dims)
            return True

        _sweep_vertices(S, collect)
        degs, dims = sweep_degs, sweep_dims
    out: dict = {}
    for x, ds in degs.items():
        F = FreeGradedModule(S.coeff, S.graph.rank, ds)
        free_dims = expand_free(F, S.window).dims
        if any(free_dims[d] != dims.get(x, {}).get(d, 0) for d in free_dims):
            return sections(S, S.graph.vertices).generator_polynomial()
        for d in ds:
            out[d // 2] = out.get(d // 2, 0) + 1
    return out


def global_sections_hilbert(S: BMSheaf) -> dict:
    """Degreewise ranks of Gamma(S) in the window, as {q-exponent: rank}."""
    dims = S.costalk_dims
    if dims is None:
        return sections(S, S.graph.vertices).hilbert()
    out: dict = {}
    for x, ds in dims.items():
        for d, n in ds.items():
            if n:
                out[d // 2] = out.get(d // 2, 0) + n
    return out


def rank_table(S: BMSheaf) -> dict:
    """vertex -> {q-exponent: multiplicity} of the stalk generators."""
    return {x: dict(sorted(F.graded_rank().items())) for x, F in sorted(S.stalks.items())}


# --- shifts, sums, decomposition ------------------------------------------------------------


def shift_sheaf(S: BMSheaf, l: int) -> BMSheaf:
    """S[l]: generator degrees and the window move down by 2l."""
    k, G = S.coeff, S.graph
    lo, hi = S.window
    window = (lo - 2 * l, hi - 2 * l)
    stalks = {x: F.shift(l) for x, F in S.stalks.items()}
    mods = {}
    for eid, M in S.edge_modules.items():
        dims = {d - 2 * l: n for d, n in M.dims.items()}
        mu = {(i, d - 2 * l): m for (i, d), m in M.mu.items()}
        mods[eid] = DegreewiseModule(k, G.rank, window, dims, mu, check=False)
    T = BMSheaf(G, k, window, stalks, mods, dict(S.rho), top=None)
    return T


def direct_sum_sheaves(sheaves: list) -> BMSheaf:
    S0 = sheaves[0]
    k, G, window = S0.coeff, S0.graph, S0.window
    for T in sheaves[1:]:
        if T.coeff != k or T.graph is not G and T.graph != G or T.window != window:
            raise ValueError("summands must share graph, coefficients and window")
    stalks, rho, mods = {}, {}, {}
    order = {}
    for x in G.vertices:
        entries = []
        for s, T in enumerate(sheaves):
            for g, d in enumerate(T.stalks[x].degrees):
                entries.append((d, s, g))
        entries.sort()
        order[x] = entries
        stalks[x] = FreeGradedModule(k, G.rank, tuple(d for d, _, _ in entries))
    for e in G.edges:
        parts = [T.edge_module(e.id) for T in sheaves]
        if all(P.is_zero() for P in parts):
            continue
        M = direct_sum(parts)
        mods[e.id] = M
        for x in (e.tail, e.head):
            imgs = []
            for d, s, g in order[x]:
                v = []
                for t, T in enumerate(sheaves):
                    if t == s:
                        v.extend(T.rho_images(x, e.id)[g])
                    else:
                        v.extend([k.zero()] * T.edge_module(e.id).dim(d))
                imgs.append(v)
            rho[(x, e.id)] = imgs
    return BMSheaf(G, k, window, stalks, mods, rho, top=None)


def decompose(S: BMSheaf, check: bool = True) -> list:
    """Multiset of (w_i, l_i) with S isomorphic to the sum of B(w_i)[l_i].

    Peels summands top-down: at each vertex the stalk rank beyond the
    projective cover of B^{delta x} spawns new summands B(x)[m].
    """
    found = []

    def visit(x, up, D, I, dD, uvecs):
        F = S.stalks[x]
        have = Counter(F.degrees)
        need = Counter(d for d, _ in minimal_generators(I)) if I is not None else Counter()
        if need - have:
            raise ValueError(f"attribution mismatch at {x}: input is not a BM sheaf")
        for d, n in sorted((have - need).items()):
            if d % 2:
                raise ValueError("odd generator degree")
            found.extend([(x, -d // 2)] * n)
        return True

    _sweep_vertices(S, visit)
    found.sort(key=lambda t: (S.graph.vertices.index(t[0]), t[1]))
    if check:
        total = {x: Counter() for x in S.graph.vertices}
        cache: dict = {}
        for w, l in found:
            B = cache.get(w)
            if B is None:
                B = cache[w] = braden_macpherson(S.graph, S.coeff, w)
            for x, F in B.stalks.items():
                for d in F.degrees:
                    total[x][d - 2 * l] += 1
        for x, F in S.stalks.items():
            if total[x] != Counter(F.degrees):
                raise ValueError(f"attribution mismatch at {x}: summands do not reproduce the stalk ranks")
    return found


# --- structure algebra ---------------------------------------------------------------------


class StructureAlgebra:
    """Z_k: tuples (z_x) with z_x = z_y mod alpha(E) along every edge."""

    def __init__(self, G: MomentGraph, k: CoeffSpec, window):
        self.graph = G
        self.coeff = k
        self.window = tuple(window)
        r = G.rank
        S1 = FreeGradedModule(k, r, (0,))
        self.ambient = direct_sum([expand_free(S1, self.window) for _ in G.vertices]) if G.vertices else DegreewiseModule.zero(k, r, self.window)
        quots, pis = [], []
        for e in G.edges:
            Q, pi = quotient_by_linear_form(S1, embed_weight(e.label, k), self.window)
            quots.append(Q)
            pis.append(pi)
        tgt = direct_sum(quots) if quots else DegreewiseModule.zero(k, r, self.window)
        idx = {v: i for i, v in enumerate(G.vertices)}
        mats = {}
        for d in self.ambient.degrees():
            nm = len(monomial_basis(r, d))
            m = linalg.zeros(k, tgt.dim(d), self.ambient.dim(d))
            row = 0
            for e, Q, pi in zip(G.edges, quots, pis):
                for x, sgn in ((e.tail, 1), (e.head, -1)):
                    c0 = idx[x] * nm
                    for a, prow in enumerate(pi.mats[d]):
                        for b, val in enumerate(prow):
                            if val:
                                m[row + a][c0 + b] = val if sgn > 0 else k.neg(val)
                row += Q.dim(d)
            mats[d] = m
        f = GradedMap(self.ambient, tgt, mats, check=False)
        self.module, self.inclusion = degreewise_kernel(f)

    def element(self, d: int, coords: list) -> dict:
        """Vertex -> GradedPolynomial for an element of degree d given in Z-coordinates."""
        k, r = self.coeff, self.graph.rank
        vec = _to_ambient(self.module, d, coords) if coords else []
        mons = monomial_basis(r, d)
        out = {}
        for i, v in enumerate(self.graph.vertices):
            chunk = vec[i * len(mons):(i + 1) * len(mons)]
            out[v] = GradedPolynomial(k, r, {m: c for m, c in zip(mons, chunk) if c})
        return out

    def coordinates_of(self, d: int, polys: dict):
        k, r = self.coeff, self.graph.rank
        idx = monomial_index(r, d)
        vec = []
        for v in self.graph.vertices:
            part = [k.zero()] * len(idx)
            for m, c in polys[v].terms.items():
                part[idx[m]] = c
            vec.extend(part)
        return linalg.coordinates(self.module.ambient_bases[d], self.module.ambient_pivots[d], vec, k)

    def multiply(self, d1: int, a: list, d2: int, b: list):
        if d1 + d2 > self.window[1]:
            raise ValueError("product leaves the window")
        pa, pb = self.element(d1, a), self.element(d2, b)
        return self.coordinates_of(d1 + d2, {v: pa[v] * pb[v] for v in self.graph.vertices})

    def multiplication_table(self, d1: int, d2: int) -> list:
        """table[i][j] = coordinates of basis_i(d1) * basis_j(d2)."""
        k = self.coeff
        n1, n2 = self.module.dim(d1), self.module.dim(d2)
        table = []
        for i in range(n1):
            ei = [k.one() if t == i else k.zero() for t in range(n1)]
            row = []
            for j in range(n2):
                ej = [k.one() if t == j else k.zero() for t in range(n2)]
                row.append(self.multiply(d1, ei, d2, ej))
            table.append(row)
        return table

    def generator_polynomial(self) -> dict:
        out: dict = {}
        for d, _ in minimal_generators(self.module):
            out[d // 2] = out.get(d // 2, 0) + 1
        return out


def structure_algebra(G: MomentGraph, k: CoeffSpec, window) -> StructureAlgebra:
    return StructureAlgebra(G, k, window)
