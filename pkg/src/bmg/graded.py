"""Graded S_k-modules presented degree by degree.

A :class:`DegreewiseModule` stores, for every even degree of a finite
window, a free k-module of finite rank with a fixed basis, together with
the action of each coordinate function x_i as a matrix from degree d to
degree d + 2.  Kernels, images, minimal generators and projective covers
all reduce to exact linear algebra in each degree.

Matrices are lists of rows; a map from a rank-n component to a rank-m
component is an m x n matrix acting on column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from . import linalg
from .lattice import LinearForm, monomial_basis, monomial_index
from .scalars import CoeffSpec, PLocalIntegers

__all__ = [
    "A4bViolation",
    "DegreeBoundError",
    "FreeGradedModule",
    "DegreewiseModule",
    "GradedMap",
    "TorsionReport",
    "expand_free",
    "quotient_by_linear_form",
    "degreewise_kernel",
    "degreewise_image",
    "generated_submodule",
    "minimal_generators",
    "projective_cover",
    "graded_rank",
    "generator_polynomial",
    "torsion_report",
    "direct_sum",
]


class A4bViolation(ValueError):
    """An edge label has no unit coordinate over the coefficient ring."""


class DegreeBoundError(RuntimeError):
    """A minimal generator reached the top of the degree window."""


def _even_range(lo: int, hi: int):
    return range(lo, hi + 1, 2)


@dataclass(frozen=True)
class FreeGradedModule:
    """Direct sum of shifted copies of S_k; ``degrees`` are generator degrees."""

    coeff: CoeffSpec
    rank: int
    degrees: tuple[int, ...] = ()

    def __post_init__(self):
        degs = tuple(sorted(int(d) for d in self.degrees))
        if any(d % 2 for d in degs):
            raise ValueError("generator degrees must be even")
        object.__setattr__(self, "degrees", degs)

    @property
    def ngens(self) -> int:
        return len(self.degrees)

    def is_zero(self) -> bool:
        return not self.degrees

    def graded_rank(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.degrees:
            out[d // 2] = out.get(d // 2, 0) + 1
        return out

    def shift(self, l: int) -> "FreeGradedModule":
        """M[l] in units of q: generators move down by 2l internal degrees."""
        return FreeGradedModule(self.coeff, self.rank, tuple(d - 2 * l for d in self.degrees))

    def basis(self, d: int) -> list[tuple[int, tuple[int, ...]]]:
        return _free_basis(self.rank, self.degrees, d)


@lru_cache(maxsize=4096)
def _free_basis(rank: int, degrees: tuple[int, ...], d: int):
    out = []
    for g, e in enumerate(degrees):
        for m in monomial_basis(rank, d - e):
            out.append((g, m))
    return out


class DegreewiseModule:
    """Truncation of a graded S_k-module to an even degree window."""

    def __init__(self, coeff: CoeffSpec, rank: int, window: tuple[int, int], dims: dict, mu: dict, check: bool = True):
        lo, hi = window
        if lo % 2 or hi % 2:
            raise ValueError("window bounds must be even")
        self.coeff = coeff
        self.rank = rank
        self.window = (lo, hi)
        self.dims = {d: int(dims.get(d, 0)) for d in _even_range(lo, hi)}
        self.mu = {}
        for i in range(rank):
            for d in _even_range(lo, hi - 2):
                m = mu.get((i, d))
                if m is None:
                    m = linalg.zeros(coeff, self.dims[d + 2], self.dims[d])
                self.mu[(i, d)] = m
        if check:
            self.check_commutativity()

    def degrees(self):
        return _even_range(*self.window)

    def dim(self, d: int) -> int:
        return self.dims.get(d, 0)

    def is_zero(self) -> bool:
        return not any(self.dims.values())

    def check_commutativity(self) -> None:
        lo, hi = self.window
        k = self.coeff
        for d in _even_range(lo, hi - 4):
            for i in range(self.rank):
                for j in range(i + 1, self.rank):
                    a = linalg.matmul(k, self.mu[(i, d + 2)], self.mu[(j, d)], self.dims[d])
                    b = linalg.matmul(k, self.mu[(j, d + 2)], self.mu[(i, d)], self.dims[d])
                    if a != b:
                        raise ValueError(f"x{i + 1} and x{j + 1} do not commute in degree {d}")

    def act(self, i: int, d: int, vec: list) -> list:
        """x_i . vec for vec in degree d."""
        return linalg.matvec(self.coeff, self.mu[(i, d)], vec)

    def act_monomial(self, d: int, vec: list, m: tuple[int, ...]) -> list:
        for i, e in enumerate(m):
            for _ in range(e):
                vec = self.act(i, d, vec)
                d += 2
        return vec

    def zero_vector(self, d: int) -> list:
        return [self.coeff.zero()] * self.dim(d)

    def to_json(self) -> dict:
        k = self.coeff
        out = {}
        for d in self.degrees():
            entry = {"rank": self.dims[d]}
            if d + 2 <= self.window[1]:
                entry["mu"] = [[[k.to_str(x) for x in row] for row in self.mu[(i, d)]] for i in range(self.rank)]
            out[str(d)] = entry
        return out

    @classmethod
    def from_json(cls, coeff: CoeffSpec, rank: int, window: tuple[int, int], data: dict) -> "DegreewiseModule":
        dims = {int(d): int(e["rank"]) for d, e in data.items()}
        mu = {}
        for d, e in data.items():
            for i, m in enumerate(e.get("mu", [])):
                mu[(i, int(d))] = [[coeff.from_str(x) for x in row] for row in m]
        for (i, d), m in list(mu.items()):
            if not m and dims.get(d + 2, 0):
                mu[(i, d)] = linalg.zeros(coeff, dims[d + 2], dims.get(d, 0))
        return cls(coeff, rank, window, dims, mu)

    @classmethod
    def zero(cls, coeff: CoeffSpec, rank: int, window: tuple[int, int]) -> "DegreewiseModule":
        return cls(coeff, rank, window, {}, {}, check=False)

    def __repr__(self):
        dims = ", ".join(f"{d}:{n}" for d, n in self.dims.items() if n)
        return f"DegreewiseModule({self.coeff.flag()}, window={self.window}, dims={{{dims}}})"


class GradedMap:
    """Degree-preserving S_k-linear map between degreewise modules."""

    def __init__(self, source: DegreewiseModule, target: DegreewiseModule, mats: dict, check: bool = True):
        if source.window != target.window:
            raise ValueError("source and target windows differ")
        self.source = source
        self.target = target
        k = source.coeff
        self.mats = {}
        for d in source.degrees():
            m = mats.get(d)
            if m is None:
                m = linalg.zeros(k, target.dim(d), source.dim(d))
            self.mats[d] = m
        if check:
            self.check_equivariance()

    def check_equivariance(self) -> None:
        k = self.source.coeff
        lo, hi = self.source.window
        for d in _even_range(lo, hi - 2):
            for i in range(self.source.rank):
                a = linalg.matmul(k, self.mats[d + 2], self.source.mu[(i, d)], self.source.dim(d))
                b = linalg.matmul(k, self.target.mu[(i, d)], self.mats[d], self.source.dim(d))
                if a != b:
                    raise ValueError(f"map does not commute with x{i + 1} in degree {d}")

    def apply(self, d: int, vec: list) -> list:
        return linalg.matvec(self.source.coeff, self.mats[d], vec)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self o other."""
        k = self.source.coeff
        mats = {d: linalg.matmul(k, self.mats[d], other.mats[d], other.source.dim(d)) for d in other.source.degrees()}
        return GradedMap(other.source, self.target, mats, check=False)

    def is_zero(self) -> bool:
        return not any(any(r) for m in self.mats.values() for r in m)


@dataclass
class TorsionReport:
    """p-power invariant factors of a quotient, per degree."""

    p: int | None
    factors: dict = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not any(self.factors.values())

    def to_json(self) -> dict:
        return {str(d): f for d, f in sorted(self.factors.items()) if f}


# --- free modules and quotients -------------------------------------------


def expand_free(F: FreeGradedModule, window: tuple[int, int]) -> DegreewiseModule:
    k, r = F.coeff, F.rank
    lo, hi = window
    dims, mu = {}, {}
    for d in _even_range(lo, hi):
        dims[d] = len(F.basis(d))
    for d in _even_range(lo, hi - 2):
        src = F.basis(d)
        tgt = {b: j for j, b in enumerate(F.basis(d + 2))}
        for i in range(r):
            m = linalg.zeros(k, dims[d + 2], dims[d])
            one = k.one()
            for j, (g, mono) in enumerate(src):
                up = list(mono)
                up[i] += 1
                m[tgt[(g, tuple(up))]][j] = one
            mu[(i, d)] = m
    return DegreewiseModule(k, r, window, dims, mu, check=False)


def _substitution(form: LinearForm, i0: int):
    """Coefficients of x_{i0} = -(sum_{j != i0} a_j x_j) / a_{i0} on reduced variables."""
    k = form.coeff
    a0 = form.coords[i0]
    return tuple(k.neg(k.div(c, a0)) for j, c in enumerate(form.coords) if j != i0)


def _reduced_product(k: CoeffSpec, f: dict, g: dict) -> dict:
    out: dict = {}
    z = k.zero()
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = k.add(out.get(m, z), k.mul(c1, c2))
    return {m: c for m, c in out.items() if c}


class _QuotientRing:
    """S_k / (alpha) identified with polynomials in the variables other than i0."""

    def __init__(self, form: LinearForm):
        i0 = form.unit_index()
        if i0 is None:
            raise A4bViolation("A4b violation: label not primitive over k")
        self.form = form
        self.k = form.coeff
        self.rank = len(form.coords)
        self.i0 = i0
        self.sub = _substitution(form, i0)
        r1 = self.rank - 1
        self.L = {}
        for j, c in enumerate(self.sub):
            if c:
                e = [0] * r1
                e[j] = 1
                self.L[tuple(e)] = c
        self._pow = [{(0,) * r1: self.k.one()}]
        self._image_cache: dict = {}

    def lpow(self, e: int) -> dict:
        while len(self._pow) <= e:
            self._pow.append(_reduced_product(self.k, self._pow[-1], self.L))
        return self._pow[e]

    def image(self, mono: tuple[int, ...]) -> dict:
        """Image of a monomial of S_k as a reduced polynomial."""
        hit = self._image_cache.get(mono)
        if hit is not None:
            return hit
        rest = tuple(e for j, e in enumerate(mono) if j != self.i0)
        out = {}
        for m, c in self.lpow(mono[self.i0]).items():
            out[tuple(a + b for a, b in zip(m, rest))] = c
        self._image_cache[mono] = out
        return out

    def variable(self, i: int) -> dict:
        """Image of x_i."""
        r1 = self.rank - 1
        if i == self.i0:
            return self.L
        j = i if i < self.i0 else i - 1
        e = [0] * r1
        e[j] = 1
        return {tuple(e): self.k.one()}


def quotient_by_linear_form(F: FreeGradedModule, alpha: LinearForm, window: tuple[int, int]):
    """F / alpha F with its canonical projection.

    Returns ``(Q, pi)`` where ``pi: expand_free(F) -> Q``.  Raises
    :class:`A4bViolation` when alpha has no unit coordinate.
    """
    k = F.coeff
    if alpha.coeff != k:
        raise TypeError(f"coefficient mismatch: {alpha.coeff} vs {k}")
    qr = _QuotientRing(alpha)
    r1 = F.rank - 1
    lo, hi = window
    qbasis = {}
    for d in _even_range(lo, hi):
        qbasis[d] = [(g, m) for g, e in enumerate(F.degrees) for m in monomial_basis(r1, d - e)]
    dims = {d: len(b) for d, b in qbasis.items()}
    mu = {}
    for d in _even_range(lo, hi - 2):
        tgt = {b: j for j, b in enumerate(qbasis[d + 2])}
        for i in range(F.rank):
            var = qr.variable(i)
            m = linalg.zeros(k, dims[d + 2], dims[d])
            for j, (g, mono) in enumerate(qbasis[d]):
                for vm, c in var.items():
                    up = tuple(a + b for a, b in zip(mono, vm))
                    row = tgt[(g, up)]
                    m[row][j] = k.add(m[row][j], c)
            mu[(i, d)] = m
    Q = DegreewiseModule(k, F.rank, window, dims, mu, check=False)
    Q.quotient_ring = qr
    Q.basis_labels = qbasis
    src = expand_free(F, window)
    mats = {}
    for d in _even_range(lo, hi):
        tgt = {b: j for j, b in enumerate(qbasis[d])}
        m = linalg.zeros(k, dims[d], src.dim(d))
        for j, (g, mono) in enumerate(F.basis(d)):
            for rm, c in qr.image(mono).items():
                row = tgt[(g, rm)]
                m[row][j] = k.add(m[row][j], c)
        mats[d] = m
    return Q, GradedMap(src, Q, mats, check=False)


def direct_sum(mods: list[DegreewiseModule]) -> DegreewiseModule:
    if not mods:
        raise ValueError("empty direct sum")
    k, r, window = mods[0].coeff, mods[0].rank, mods[0].window
    dims = {d: sum(M.dim(d) for M in mods) for d in _even_range(*window)}
    mu = {}
    for d in _even_range(window[0], window[1] - 2):
        for i in range(r):
            m = linalg.zeros(k, dims[d + 2], dims[d])
            ro = co = 0
            for M in mods:
                blk = M.mu[(i, d)]
                for a, row in enumerate(blk):
                    for b, x in enumerate(row):
                        if x:
                            m[ro + a][co + b] = x
                ro += M.dim(d + 2)
                co += M.dim(d)
            mu[(i, d)] = m
    return DegreewiseModule(k, r, window, dims, mu, check=False)


# --- kernels, images, submodules ------------------------------------------


def _pivots(basis: list[list]) -> list[int]:
    out = []
    for row in basis:
        out.append(next(j for j, x in enumerate(row) if x))
    return out


def _restricted_module(ambient: DegreewiseModule, bases: dict) -> tuple[DegreewiseModule, GradedMap]:
    """Submodule with the given per-degree lattice bases (canonical echelon rows)."""
    k = ambient.coeff
    lo, hi = ambient.window
    dims = {d: len(bases[d]) for d in _even_range(lo, hi)}
    piv = {d: _pivots(bases[d]) for d in _even_range(lo, hi)}
    mu = {}
    for d in _even_range(lo, hi - 2):
        for i in range(ambient.rank):
            cols = []
            for v in bases[d]:
                w = ambient.act(i, d, v)
                c = linalg.coordinates(bases[d + 2], piv[d + 2], w, k)
                if c is None:
                    raise ValueError(f"submodule not stable under x{i + 1} in degree {d}")
                cols.append(c)
            mu[(i, d)] = linalg.transpose(cols, dims[d + 2]) if cols else [[] for _ in range(dims[d + 2])]
    sub = DegreewiseModule(k, ambient.rank, ambient.window, dims, mu, check=False)
    sub.ambient_bases = bases
    sub.ambient_pivots = piv
    incl = {d: linalg.transpose(bases[d], ambient.dim(d)) if bases[d] else linalg.zeros(k, ambient.dim(d), 0)
            for d in _even_range(lo, hi)}
    return sub, GradedMap(sub, ambient, incl, check=False)


def degreewise_kernel(f: GradedMap) -> tuple[DegreewiseModule, GradedMap]:
    """Kernel (saturated over Z_(p)) with its inclusion into the source."""
    k = f.source.coeff
    bases = {d: linalg.kernel_basis(f.mats[d], k, f.source.dim(d)) for d in f.source.degrees()}
    return _restricted_module(f.source, bases)


def degreewise_image(f: GradedMap) -> tuple[DegreewiseModule, GradedMap, GradedMap]:
    """Image of f as a submodule of the target (not saturated).

    Returns ``(I, epi, incl)`` with ``incl o epi == f``.
    """
    k = f.source.coeff
    bases = {}
    for d in f.source.degrees():
        b, _ = linalg.image_basis(f.mats[d], k, f.source.dim(d))
        bases[d] = b
    I, incl = _restricted_module(f.target, bases)
    mats = {}
    for d in f.source.degrees():
        cols = []
        for j in range(f.source.dim(d)):
            v = [row[j] for row in f.mats[d]]
            cols.append(linalg.coordinates(bases[d], I.ambient_pivots[d], v, k))
        mats[d] = linalg.transpose(cols, I.dim(d)) if cols else linalg.zeros(k, I.dim(d), 0)
    return I, GradedMap(f.source, I, mats, check=False), incl


def generated_submodule(M: DegreewiseModule, elements: list[tuple[int, list]]) -> tuple[DegreewiseModule, GradedMap]:
    """Submodule of M generated by homogeneous ``(degree, vector)`` elements.

    Built degree by degree: the component in degree d is the lattice span of
    x_i applied to degree d - 2 plus the given elements of degree d.
    """
    k = M.coeff
    lo, hi = M.window
    by_deg: dict = {}
    for d, v in elements:
        if lo <= d <= hi:
            by_deg.setdefault(d, []).append([k.coerce(x) for x in v])
    bases = {}
    prev = []
    for d in _even_range(lo, hi):
        span = list(by_deg.get(d, []))
        if d > lo:
            for v in prev:
                for i in range(M.rank):
                    span.append(M.act(i, d - 2, v))
        if span:
            basis, _ = linalg.canonical_basis(span, k, M.dim(d))
        else:
            basis = []
        bases[d] = basis
        prev = basis
    return _restricted_module(M, bases)


# --- generators and covers -------------------------------------------------


def minimal_generators(M: DegreewiseModule, audit: bool = False) -> list[tuple[int, list]]:
    """Minimal homogeneous generators via graded Nakayama.

    In degree d the generators are lifts of a basis of M_d / (m M)_d over
    the residue field, where (m M)_d is the span of x_i M_{d-2} together
    with p M_d over Z_(p).  Lifts are the standard basis vectors of M_d at
    the non-pivot positions of the echelon form of (m M)_d.  With ``audit``
    a generator in the top degree of the window raises
    :class:`DegreeBoundError`.
    """
    k = M.coeff
    res = k.residue_field
    out = []
    lo, hi = M.window
    for d in M.degrees():
        n = M.dim(d)
        if not n:
            continue
        span = []
        if d > lo:
            for i in range(M.rank):
                mu = M.mu[(i, d - 2)]
                for j in range(M.dim(d - 2)):
                    span.append([mu[a][j] for a in range(n)])
        if res is not k:
            span = [[k.residue(x) for x in v] for v in span]
        _, pivots, _ = linalg.echelon(span, res, n)
        taken = set(pivots)
        for j in range(n):
            if j not in taken:
                v = [k.zero()] * n
                v[j] = k.one()
                out.append((d, v))
    if audit and any(d == hi for d, _ in out) and hi > lo:
        raise DegreeBoundError(f"degree bound too small: generator in top degree {hi}")
    return out


def cover_map(F: FreeGradedModule, M: DegreewiseModule, images: list[list], src: DegreewiseModule | None = None) -> GradedMap:
    """The map expand_free(F) -> M sending generator g to ``images[g]``."""
    k = M.coeff
    if src is None:
        src = expand_free(F, M.window)
    mats = {}
    cache: dict = {}
    for d in M.degrees():
        cols = []
        for g, mono in F.basis(d):
            if not any(mono):
                v = images[g]
            else:
                i = next(j for j, e in enumerate(mono) if e)
                lower = list(mono)
                lower[i] -= 1
                lower = tuple(lower)
                v = M.act(i, d - 2, cache[(g, lower)])
            cache[(g, mono)] = v
            cols.append(v)
        mats[d] = linalg.transpose(cols, M.dim(d)) if cols else linalg.zeros(k, M.dim(d), 0)
    return GradedMap(src, M, mats, check=False)


def projective_cover(M: DegreewiseModule, audit: bool = False) -> tuple[FreeGradedModule, GradedMap]:
    gens = minimal_generators(M, audit=audit)
    F = FreeGradedModule(M.coeff, M.rank, tuple(d for d, _ in gens))
    # FreeGradedModule sorts degrees; minimal_generators already yields ascending degrees
    return F, cover_map(F, M, [v for _, v in gens])


def graded_rank(M) -> dict[int, int]:
    """q-exponent -> multiplicity.

    For a free module this is the generator polynomial; for a degreewise
    module it is the table of component ranks (q^j <-> degree 2j).
    """
    if isinstance(M, FreeGradedModule):
        return M.graded_rank()
    return {d // 2: n for d, n in M.dims.items() if n}


def generator_polynomial(M: DegreewiseModule) -> dict[int, int]:
    """Degrees of a minimal generating set, as a q-polynomial."""
    out: dict[int, int] = {}
    for d, _ in minimal_generators(M):
        out[d // 2] = out.get(d // 2, 0) + 1
    return out


def torsion_report(presentation, coeff: CoeffSpec | None = None) -> TorsionReport:
    """p-power invariant factors of the cokernel of a degreewise presentation.

    ``presentation`` is a :class:`GradedMap` (sub -> ambient) or a dict
    degree -> (matrix, ncols) together with ``coeff``.
    """
    if isinstance(presentation, GradedMap):
        k = presentation.source.coeff
        items = [(d, presentation.mats[d], presentation.source.dim(d)) for d in presentation.source.degrees()]
    else:
        if coeff is None:
            raise TypeError("coeff is required for a raw presentation")
        k = coeff
        items = [(d, [[k.coerce(x) for x in row] for row in m], n) for d, (m, n) in presentation.items()]
    p = k.p if isinstance(k, PLocalIntegers) else None
    rep = TorsionReport(p)
    if p is None:
        return rep
    for d, m, n in items:
        if not m or not n:
            continue
        _, D, _ = linalg.smith_normal_form(m, k, n)
        facs = []
        for t in range(min(len(D), n)):
            x = D[t][t]
            if x:
                v = k.valuation(x)
                if v:
                    facs.append(p ** v)
        if facs:
            rep.factors[d] = facs
    return rep
