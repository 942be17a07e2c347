"""Coefficient rings: the rationals, prime fields and the p-local integers.

Raw ring elements are kept unwrapped for speed inside the linear algebra:
``gmpy2.mpq`` for ``Rationals`` and ``PLocalIntegers``, plain ``int`` in
``[0, p)`` for ``PrimeField``.  :class:`Scalar` wraps a raw value together
with its ring for the public API.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

__all__ = [
    "CoeffSpec",
    "Rationals",
    "PrimeField",
    "PLocalIntegers",
    "Scalar",
    "QQ",
    "is_prime",
    "parse_coeff",
    "reduce_mod_p",
]


def is_prime(n: int) -> bool:
    """Deterministic trial division; coefficient primes are small."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _valuation_int(n, p: int) -> int:
    n = abs(int(n))
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class CoeffSpec:
    """Base class of the three coefficient rings.

    Subclasses implement the handful of raw-element primitives the
    elimination routines need.  ``valuation`` is 0 for every nonzero
    element of a field, so field and local-ring code paths coincide.
    """

    p: int | None = None
    is_field: bool = True

    # construction / normalisation
    def __call__(self, value) -> "Scalar":
        return Scalar(self, self.coerce(value))

    def coerce(self, value):
        raise NotImplementedError

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    # arithmetic on raw values
    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def valuation(self, a) -> int:
        """p-adic valuation of a nonzero raw element (0 over fields)."""
        return 0

    def is_unit(self, a) -> bool:
        return bool(a) and self.valuation(a) == 0

    def divides(self, a, b) -> bool:
        """True iff ``a`` divides ``b`` in the ring."""
        if not b:
            return True
        if not a:
            return False
        return self.valuation(a) <= self.valuation(b)

    def div(self, a, b):
        """Exact quotient a / b; caller guarantees divisibility."""
        return a / b

    def residue(self, a) -> int:
        """Image in the residue field (returns a raw residue-field element)."""
        return a

    @property
    def residue_field(self) -> "CoeffSpec":
        return self

    @property
    def characteristic(self) -> int:
        """Residue characteristic."""
        return 0

    def to_str(self, a) -> str:
        raise NotImplementedError

    def from_str(self, s: str):
        raise NotImplementedError

    def canonical_rep(self, a, v: int):
        """Canonical representative of ``a`` modulo p^v (v > 0)."""
        return self.zero()

    def flag(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.flag()


class Rationals(CoeffSpec):
    """The field Q."""

    def coerce(self, value):
        if isinstance(value, Scalar):
            value = value.value
        if isinstance(value, str):
            return self.from_str(value)
        return mpq(value)

    def to_str(self, a) -> str:
        return f"{a.numerator}/{a.denominator}"

    def from_str(self, s: str):
        s = s.strip()
        if "/" in s:
            num, den = s.split("/")
            return mpq(int(num), int(den))
        return mpq(int(s))

    def flag(self) -> str:
        return "Q"

    def __eq__(self, other):
        return type(other) is Rationals

    def __hash__(self):
        return hash("Q")


class PrimeField(CoeffSpec):
    """The field F_p, raw elements are ints in [0, p)."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = int(p)

    def coerce(self, value):
        if isinstance(value, Scalar):
            if isinstance(value.coeff, PLocalIntegers) and value.coeff.p == self.p:
                return value.coeff.residue(value.value)
            value = value.value
        if isinstance(value, str):
            return self.from_str(value)
        if isinstance(value, (Fraction, type(mpq(0)))):
            num, den = int(value.numerator), int(value.denominator)
            if den % self.p == 0:
                raise ZeroDivisionError(f"denominator {den} not invertible mod {self.p}")
            return num * pow(den, -1, self.p) % self.p
        return int(value) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def div(self, a, b):
        return a * pow(b, -1, self.p) % self.p

    def to_str(self, a) -> str:
        return f"{a} mod {self.p}"

    def from_str(self, s: str):
        s = s.strip()
        if "mod" in s:
            r, p = s.split("mod")
            if int(p) != self.p:
                raise ValueError(f"residue {s!r} is not over F_{self.p}")
            return int(r) % self.p
        return int(s) % self.p

    @property
    def characteristic(self) -> int:
        return self.p

    def flag(self) -> str:
        return f"Fp:{self.p}"

    def __eq__(self, other):
        return type(other) is PrimeField and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))


class PLocalIntegers(CoeffSpec):
    """Z_(p): rationals whose denominator is prime to p.

    A local PID with uniformiser p and residue field F_p; used as an exact
    stand-in for the p-adic integers.
    """

    is_field = False

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = int(p)
        self._residue = PrimeField(p)

    def coerce(self, value):
        if isinstance(value, Scalar):
            value = value.value
        if isinstance(value, str):
            value = Rationals().from_str(value)
        value = mpq(value)
        if value.denominator % self.p == 0:
            raise ValueError(f"{value} is not {self.p}-integral")
        return value

    def valuation(self, a) -> int:
        return _valuation_int(a.numerator, self.p)

    def div(self, a, b):
        q = a / b
        if q.denominator % self.p == 0:
            raise ArithmeticError(f"{a} is not divisible by {b} in Z_({self.p})")
        return q

    def residue(self, a) -> int:
        return int(a.numerator) * pow(int(a.denominator), -1, self.p) % self.p

    @property
    def residue_field(self) -> CoeffSpec:
        return self._residue

    @property
    def characteristic(self) -> int:
        return self.p

    def canonical_rep(self, a, v: int):
        m = self.p ** v
        return mpq(int(a.numerator) * pow(int(a.denominator), -1, m) % m)

    def to_str(self, a) -> str:
        return f"{a.numerator}/{a.denominator}"

    def from_str(self, s: str):
        return self.coerce(s)

    def flag(self) -> str:
        return f"Zp:{self.p}"

    def __eq__(self, other):
        return type(other) is PLocalIntegers and other.p == self.p

    def __hash__(self):
        return hash(("Zp", self.p))


QQ = Rationals()


def parse_coeff(flag: str) -> CoeffSpec:
    """Parse the CLI coefficient grammar ``Q``, ``Fp:<p>``, ``Zp:<p>``."""
    flag = flag.strip()
    if flag == "Q":
        return QQ
    kind, _, p = flag.partition(":")
    if not p:
        raise ValueError(f"bad coefficient flag {flag!r}")
    if kind == "Fp":
        return PrimeField(int(p))
    if kind == "Zp":
        return PLocalIntegers(int(p))
    raise ValueError(f"bad coefficient flag {flag!r}")


@dataclass(frozen=True)
class Scalar:
    """An element of a coefficient ring, tagged with the ring."""

    coeff: CoeffSpec
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.coeff.coerce(self.value))

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.coeff != self.coeff:
                raise TypeError(f"coefficient mismatch: {self.coeff} vs {other.coeff}")
            return other.value
        return self.coeff.coerce(other)

    def __add__(self, other):
        return Scalar(self.coeff, self.coeff.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.coeff, self.coeff.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return Scalar(self.coeff, self.coeff.sub(self._other(other), self.value))

    def __mul__(self, other):
        return Scalar(self.coeff, self.coeff.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(self.coeff, self.coeff.neg(self.value))

    def __truediv__(self, other):
        o = self._other(other)
        if not o:
            raise ZeroDivisionError("division by zero")
        if not self.coeff.divides(o, self.value):
            raise ArithmeticError(f"{self} is not divisible by {other}")
        return Scalar(self.coeff, self.coeff.div(self.value, o))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.coeff == other.coeff and self.value == other.value
        try:
            return self.value == self.coeff.coerce(other)
        except (ValueError, ZeroDivisionError):
            return False

    def __hash__(self):
        return hash((self.coeff, self.value))

    def __bool__(self):
        return bool(self.value)

    def is_unit(self) -> bool:
        return self.coeff.is_unit(self.value)

    def valuation(self) -> int | float:
        if not self.value:
            return float("inf")
        return self.coeff.valuation(self.value)

    def __str__(self):
        return self.coeff.to_str(self.value)

    def __repr__(self):
        return f"Scalar({self.coeff.flag()}, {self})"


def reduce_mod_p(s: Scalar) -> Scalar:
    """Reduce an element of Z_(p) to the residue field F_p."""
    if not isinstance(s.coeff, PLocalIntegers):
        raise TypeError(f"reduce_mod_p expects a Z_(p) scalar, got {s.coeff}")
    return Scalar(s.coeff.residue_field, s.coeff.residue(s.value))
