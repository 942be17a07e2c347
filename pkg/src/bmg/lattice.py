"""Character lattice Y = Z^r and the graded symmetric algebra S_k = S(Y (x) k).

Generators of S_k (the coordinate functions x_1..x_r) sit in degree 2, so
a monomial with total exponent d has internal degree 2d.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

from .scalars import CoeffSpec, PrimeField, Scalar

__all__ = [
    "Lattice",
    "Weight",
    "LinearForm",
    "GradedPolynomial",
    "embed_weight",
    "proportional_over_k",
    "primitive_mod_p",
    "monomial_basis",
    "monomial_index",
    "sign_normalize",
]


@dataclass(frozen=True)
class Lattice:
    rank: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("lattice rank must be >= 1")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"x{i + 1}" for i in range(self.rank)))
        if len(self.labels) != self.rank:
            raise ValueError("need one label per basis vector")


@dataclass(frozen=True)
class Weight:
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    def __len__(self):
        return len(self.coords)

    def __neg__(self):
        return Weight(tuple(-c for c in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)


def sign_normalize(w: Weight) -> Weight:
    """Flip sign so that the first nonzero coordinate is positive."""
    for c in w.coords:
        if c:
            return w if c > 0 else -w
    return w


@dataclass(frozen=True)
class LinearForm:
    """Image of a weight in Y (x) k; a degree-2 element of S_k."""

    coeff: CoeffSpec
    coords: tuple

    @property
    def degree(self) -> int:
        return 2

    def is_zero(self) -> bool:
        return not any(self.coords)

    def unit_index(self) -> int | None:
        """First coordinate that is a unit of k, if any."""
        for i, c in enumerate(self.coords):
            if self.coeff.is_unit(c):
                return i
        return None


def embed_weight(w: Weight, k: CoeffSpec) -> LinearForm:
    return LinearForm(k, tuple(k.coerce(c) for c in w.coords))


def _minors_vanish(a: tuple, b: tuple, p: int | None) -> bool:
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            m = a[i] * b[j] - a[j] * b[i]
            if (m % p if p else m) != 0:
                return False
    return True


def proportional_over_k(a: Weight, b: Weight, k: CoeffSpec) -> bool:
    """True iff the lines k*a and k*b meet nontrivially in Y (x) k."""
    if a.is_zero() or b.is_zero():
        raise ValueError("edge labels must be nonzero in Y")
    if len(a) != len(b):
        raise ValueError("rank mismatch")
    if isinstance(k, PrimeField):
        p = k.p
        if all(c % p == 0 for c in a.coords) or all(c % p == 0 for c in b.coords):
            return True
        return _minors_vanish(a.coords, b.coords, p)
    # Q and Z_(p) are domains with fraction field Q
    return _minors_vanish(a.coords, b.coords, None)


def primitive_mod_p(a: Weight, p: int) -> bool:
    g = 0
    for c in a.coords:
        g = gcd(g, c)
    return g != 0 and g % p != 0


@lru_cache(maxsize=None)
def monomial_basis(rank: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of internal degree ``degree`` in deg-lex order.

    Within a degree the order is lexicographically decreasing, so for
    r = 2, degree 2 the basis is ((1, 0), (0, 1)).
    """
    if degree < 0 or degree % 2:
        return ()
    d = degree // 2
    if rank == 0:
        return ((),) if d == 0 else ()

    def rec(r, d):
        if r == 1:
            yield (d,)
            return
        for first in range(d, -1, -1):
            for rest in rec(r - 1, d - first):
                yield (first,) + rest

    return tuple(rec(rank, d))


@lru_cache(maxsize=None)
def monomial_index(rank: int, degree: int) -> dict:
    return {m: i for i, m in enumerate(monomial_basis(rank, degree))}


@dataclass(frozen=True)
class GradedPolynomial:
    """Sparse element of S_k: exponent vector -> raw coefficient."""

    coeff: CoeffSpec
    rank: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, c in self.terms.items():
            m = tuple(int(e) for e in m)
            if len(m) != self.rank:
                raise ValueError("exponent vector has wrong length")
            c = self.coeff.coerce(c)
            if c:
                clean[m] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def variable(cls, coeff: CoeffSpec, rank: int, i: int) -> "GradedPolynomial":
        m = [0] * rank
        m[i] = 1
        return cls(coeff, rank, {tuple(m): 1})

    @classmethod
    def constant(cls, coeff: CoeffSpec, rank: int, c=1) -> "GradedPolynomial":
        return cls(coeff, rank, {(0,) * rank: c})

    @classmethod
    def from_form(cls, form: LinearForm) -> "GradedPolynomial":
        r = len(form.coords)
        terms = {}
        for i, c in enumerate(form.coords):
            m = [0] * r
            m[i] = 1
            terms[tuple(m)] = c
        return cls(form.coeff, r, terms)

    def _check(self, other: "GradedPolynomial"):
        if other.coeff != self.coeff or other.rank != self.rank:
            raise TypeError(f"coefficient mismatch: {self.coeff} vs {other.coeff}")

    def __add__(self, other: "GradedPolynomial") -> "GradedPolynomial":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = self.coeff.add(out.get(m, self.coeff.zero()), c)
        return GradedPolynomial(self.coeff, self.rank, out)

    def __neg__(self):
        return GradedPolynomial(self.coeff, self.rank, {m: self.coeff.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "GradedPolynomial":
        if isinstance(other, GradedPolynomial):
            self._check(other)
            out: dict = {}
            z = self.coeff.zero()
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    out[m] = self.coeff.add(out.get(m, z), self.coeff.mul(c1, c2))
            return GradedPolynomial(self.coeff, self.rank, out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s) -> "GradedPolynomial":
        if isinstance(s, Scalar):
            if s.coeff != self.coeff:
                raise TypeError(f"coefficient mismatch: {self.coeff} vs {s.coeff}")
            s = s.value
        else:
            s = self.coeff.coerce(s)
        return GradedPolynomial(self.coeff, self.rank, {m: self.coeff.mul(c, s) for m, c in self.terms.items()})

    def degrees(self) -> set[int]:
        return {2 * sum(m) for m in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> dict:
        return {",".join(map(str, m)): self.coeff.to_str(c) for m, c in sorted(self.terms.items())}

    @classmethod
    def from_json(cls, coeff: CoeffSpec, rank: int, data: dict) -> "GradedPolynomial":
        terms = {}
        for key, val in data.items():
            m = tuple(int(e) for e in key.split(",")) if key else ()
            terms[m] = coeff.from_str(val)
        return cls(coeff, rank, terms)
