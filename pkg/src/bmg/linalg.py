"""Exact linear algebra over a field or the local PID Z_(p).

Every routine works on raw ring elements (see :mod:`bmg.scalars`) stored
as lists of rows.  Elimination always pivots on an entry of minimal
p-valuation (first such entry in scan order), so each step is an exact
division and all transformations are invertible over the ring.
"""

from __future__ import annotations

from .scalars import CoeffSpec, PLocalIntegers, Scalar

__all__ = [
    "ScalarMatrix",
    "echelon",
    "canonical_basis",
    "coordinates",
    "kernel_basis",
    "image_basis",
    "solve_linear",
    "smith_normal_form",
    "rank",
    "residue_rank",
    "matmul",
    "matvec",
    "identity",
    "zeros",
    "transpose",
]


def zeros(ring: CoeffSpec, m: int, n: int) -> list[list]:
    z = ring.zero()
    return [[z] * n for _ in range(m)]


def identity(ring: CoeffSpec, n: int) -> list[list]:
    rows = zeros(ring, n, n)
    one = ring.one()
    for i in range(n):
        rows[i][i] = one
    return rows


def transpose(rows: list[list], ncols: int | None = None) -> list[list]:
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*rows)]


def matmul(ring: CoeffSpec, a: list[list], b: list[list], ncols_b: int | None = None) -> list[list]:
    """Product of an m x k and a k x n matrix."""
    if not a:
        return []
    if not b:
        n = ncols_b if ncols_b is not None else 0
        return zeros(ring, len(a), n)
    z = ring.zero()
    bt = list(zip(*b))
    p = ring.p if ring.is_field and ring.p else None
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        new = []
        for col in bt:
            s = z
            for k, x in nz:
                y = col[k]
                if y:
                    s = s + x * y
            new.append(s % p if p else s)
        out.append(new)
    return out


def matvec(ring: CoeffSpec, a: list[list], v: list) -> list:
    p = ring.p if ring.is_field and ring.p else None
    z = ring.zero()
    nz = [(k, x) for k, x in enumerate(v) if x]
    out = []
    for row in a:
        s = z
        for k, x in nz:
            y = row[k]
            if y:
                s = s + x * y
        out.append(s % p if p else s)
    return out


def _axpy(ring: CoeffSpec, row: list, f, piv_row: list, start: int = 0) -> None:
    """row <- row - f * piv_row, in place from column ``start``."""
    p = ring.p if ring.is_field and ring.p else None
    if p:
        for j in range(start, len(row)):
            y = piv_row[j]
            if y:
                row[j] = (row[j] - f * y) % p
    else:
        for j in range(start, len(row)):
            y = piv_row[j]
            if y:
                row[j] = row[j] - f * y


def _scale(ring: CoeffSpec, row: list, f) -> list:
    p = ring.p if ring.is_field and ring.p else None
    if p:
        return [x * f % p for x in row]
    return [x * f for x in row]


def echelon(rows: list[list], ring: CoeffSpec, ncols: int, track: bool = False):
    """Row echelon form of the row span.

    Returns ``(ech, pivots, transform)`` where ``ech[:len(pivots)]`` is a
    basis of the row-span lattice, the remaining rows of ``ech`` are zero,
    and ``transform`` (when ``track``) is an invertible matrix with
    ``transform * rows == ech``.  Its rows past ``len(pivots)`` span the
    saturated left kernel.
    """
    R = [list(r) for r in rows]
    m = len(R)
    T = identity(ring, m) if track else None
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        best, bestv = -1, None
        for i in range(r, m):
            x = R[i][c]
            if x:
                v = ring.valuation(x)
                if bestv is None or v < bestv:
                    best, bestv = i, v
                    if v == 0:
                        break
        if best < 0:
            continue
        if best != r:
            R[r], R[best] = R[best], R[r]
            if track:
                T[r], T[best] = T[best], T[r]
        piv_row = R[r]
        piv = piv_row[c]
        for i in range(r + 1, m):
            x = R[i][c]
            if x:
                f = ring.div(x, piv)
                _axpy(ring, R[i], f, piv_row, c)
                if track:
                    _axpy(ring, T[i], f, T[r])
        pivots.append(c)
        r += 1
    return R, pivots, T


def canonical_basis(rows: list[list], ring: CoeffSpec, ncols: int):
    """Canonical basis of the row-span lattice.

    Reduced row echelon form over a field; over Z_(p) the Hermite form with
    pivots p^v and entries above each pivot reduced to integers in [0, p^v).
    Returns ``(basis, pivots)``.
    """
    R, pivots, _ = echelon(rows, ring, ncols)
    R = R[: len(pivots)]
    local = isinstance(ring, PLocalIntegers)
    for k, c in enumerate(pivots):
        piv = R[k][c]
        if local:
            v = ring.valuation(piv)
            unit = piv / ring.p ** v
            R[k] = [x / unit for x in R[k]]
            if v:
                for j in range(k):
                    x = R[j][c]
                    if x:
                        rep = ring.canonical_rep(x, v)
                        f = (x - rep) / ring.p ** v
                        _axpy(ring, R[j], f, R[k], c)
                        R[j][c] = rep
            else:
                for j in range(k):
                    x = R[j][c]
                    if x:
                        _axpy(ring, R[j], x, R[k], c)
        else:
            if piv != ring.one():
                R[k] = _scale(ring, R[k], ring.div(ring.one(), piv))
            for j in range(k):
                x = R[j][c]
                if x:
                    _axpy(ring, R[j], x, R[k], c)
    return R, pivots


def coordinates(basis: list[list], pivots: list[int], vec: list, ring: CoeffSpec):
    """Coordinates of ``vec`` in an echelon basis, or None if not in the span lattice."""
    b = list(vec)
    coords = []
    for row, c in zip(basis, pivots):
        x = b[c]
        if not x:
            coords.append(ring.zero())
            continue
        piv = row[c]
        if not ring.divides(piv, x):
            return None
        f = ring.div(x, piv)
        _axpy(ring, b, f, row, c)
        coords.append(f)
    if any(b):
        return None
    return coords


def kernel_basis(a: list[list], ring: CoeffSpec, ncols: int) -> list[list]:
    """Basis of {v : a v = 0}; over Z_(p) it spans a direct summand."""
    at = transpose(a, ncols) if a else [[] for _ in range(ncols)]
    nrows = len(a)
    R, pivots, T = echelon(at, ring, nrows, track=True)
    ker = T[len(pivots):]
    if not ker:
        return []
    basis, _ = canonical_basis(ker, ring, ncols)
    return basis


def image_basis(a: list[list], ring: CoeffSpec, ncols: int):
    """Canonical basis (as vectors) of the column-span lattice of ``a``; returns (basis, pivots)."""
    if not a:
        return [], []
    return canonical_basis(transpose(a, ncols), ring, len(a))


def rank(a: list[list], ring: CoeffSpec, ncols: int) -> int:
    _, pivots, _ = echelon(a, ring, ncols)
    return len(pivots)


def residue_rank(vectors: list[list], ring: CoeffSpec, ncols: int) -> int:
    """Rank of the reductions of ``vectors`` over the residue field."""
    res = ring.residue_field
    if res is ring:
        return rank(vectors, ring, ncols)
    red = [[ring.residue(x) for x in v] for v in vectors]
    return rank(red, res, ncols)


def solve_linear(a: list[list], b: list, ring: CoeffSpec, ncols: int):
    """Some x with a x = b over the ring, or None when no solution exists."""
    at = transpose(a, ncols) if a else [[] for _ in range(ncols)]
    R, pivots, T = echelon(at, ring, len(a), track=True)
    y = coordinates(R[: len(pivots)], pivots, b, ring)
    if y is None:
        return None
    x = [ring.zero()] * ncols
    for coef, trow in zip(y, T):
        if coef:
            x = [xi + coef * ti for xi, ti in zip(x, trow)]
    if ring.is_field and ring.p:
        x = [xi % ring.p for xi in x]
    return x


class Solver:
    """Factor ``a`` once and solve ``a x = b`` for many right-hand sides."""

    def __init__(self, a: list[list], ring: CoeffSpec, ncols: int):
        self.ring = ring
        self.ncols = ncols
        at = transpose(a, ncols) if a else [[] for _ in range(ncols)]
        R, pivots, T = echelon(at, ring, len(a), track=True)
        self.basis = R[: len(pivots)]
        self.pivots = pivots
        self.T = T[: len(pivots)]

    def solve(self, b: list):
        ring = self.ring
        y = coordinates(self.basis, self.pivots, b, ring)
        if y is None:
            return None
        x = [ring.zero()] * self.ncols
        for coef, trow in zip(y, self.T):
            if coef:
                _axpy(ring, x, ring.neg(coef), trow)
        return x


def smith_normal_form(a: list[list], ring: CoeffSpec, ncols: int):
    """Return (U, D, V) with U a V = D diagonal and U, V invertible.

    Pivot: entry of minimal valuation in the remaining block, first in
    row-major order.  Diagonal entries are normalised to p^v over Z_(p)
    and to 1 over a field.
    """
    m, n = len(a), ncols
    D = [list(r) for r in a]
    U = identity(ring, m)
    V = identity(ring, n)
    local = isinstance(ring, PLocalIntegers)
    for t in range(min(m, n)):
        best, bestv = None, None
        for i in range(t, m):
            for j in range(t, n):
                x = D[i][j]
                if x:
                    v = ring.valuation(x)
                    if bestv is None or v < bestv:
                        best, bestv = (i, j), v
        if best is None:
            break
        i, j = best
        if i != t:
            D[t], D[i] = D[i], D[t]
            U[t], U[i] = U[i], U[t]
        if j != t:
            for row in D:
                row[t], row[j] = row[j], row[t]
            for row in V:
                row[t], row[j] = row[j], row[t]
        piv = D[t][t]
        unit = piv / ring.p ** bestv if local else piv
        if unit != ring.one():
            inv = ring.div(ring.one(), unit)
            D[t] = _scale(ring, D[t], inv)
            U[t] = _scale(ring, U[t], inv)
            piv = D[t][t]
        for i in range(t + 1, m):
            x = D[i][t]
            if x:
                f = ring.div(x, piv)
                _axpy(ring, D[i], f, D[t])
                _axpy(ring, U[i], f, U[t])
        for j in range(t + 1, n):
            x = D[t][j]
            if x:
                f = ring.div(x, piv)
                for row in D:
                    y = row[t]
                    if y:
                        row[j] = row[j] - f * y
                for row in V:
                    y = row[t]
                    if y:
                        row[j] = row[j] - f * y
                if ring.is_field and ring.p:
                    for row in D:
                        row[j] %= ring.p
                    for row in V:
                        row[j] %= ring.p
    return U, D, V


class ScalarMatrix:
    """A matrix of scalars over one coefficient ring (public wrapper)."""

    def __init__(self, coeff: CoeffSpec, rows, ncols: int | None = None):
        self.coeff = coeff
        self.rows = [[coeff.coerce(x) for x in r] for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, coeff: CoeffSpec, n: int) -> "ScalarMatrix":
        return cls(coeff, identity(coeff, n), n)

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return Scalar(self.coeff, self.rows[i][j])

    def __matmul__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        if other.coeff != self.coeff:
            raise TypeError("coefficient mismatch")
        return ScalarMatrix(self.coeff, matmul(self.coeff, self.rows, other.rows, other.ncols), other.ncols)

    def __eq__(self, other):
        return (
            isinstance(other, ScalarMatrix)
            and self.coeff == other.coeff
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def rank(self) -> int:
        return rank(self.rows, self.coeff, self.ncols)

    def determinant(self) -> Scalar:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        R = [list(r) for r in self.rows]
        ring = self.coeff
        n = self.nrows
        det = ring.one()
        for c in range(n):
            piv = next((i for i in range(c, n) if R[i][c]), None)
            if piv is None:
                return Scalar(ring, ring.zero())
            if piv != c:
                R[c], R[piv] = R[piv], R[c]
                det = ring.neg(det)
            # determinant is taken in the fraction field, then coerced back
            for i in range(c + 1, n):
                if R[i][c]:
                    f = R[i][c] / R[c][c] if not (ring.is_field and ring.p) else ring.div(R[i][c], R[c][c])
                    _axpy(ring, R[i], f, R[c], c)
            det = ring.mul(det, R[c][c])
        return Scalar(ring, det)

    def __repr__(self):
        body = "; ".join(" ".join(self.coeff.to_str(x) for x in r) for r in self.rows)
        return f"ScalarMatrix({self.coeff.flag()}, [{body}])"
