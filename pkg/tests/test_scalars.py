from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bmg.scalars import QQ, PLocalIntegers, PrimeField, Scalar, parse_coeff, reduce_mod_p

PRIMES = [2, 3, 5, 7]


def test_parse_coeff_flags():
    assert parse_coeff("Q") == QQ
    assert parse_coeff("Fp:5") == PrimeField(5)
    assert parse_coeff("Zp:3") == PLocalIntegers(3)
    for bad in ("F5", "Fp:", "Fp:4", "Zp:1", "R"):
        with pytest.raises(ValueError):
            parse_coeff(bad)


def test_flags_roundtrip():
    for k in (QQ, PrimeField(7), PLocalIntegers(2)):
        assert parse_coeff(k.flag()) == k


def test_plocal_rejects_bad_denominators():
    Z3 = PLocalIntegers(3)
    assert Scalar(Z3, Fraction(1, 2)).is_unit()
    with pytest.raises(ValueError):
        Scalar(Z3, Fraction(1, 3))


def test_plocal_valuation_and_division():
    Z2 = PLocalIntegers(2)
    a = Scalar(Z2, 12)
    assert a.valuation() == 2
    assert not a.is_unit()
    assert (a / 3).valuation() == 2
    with pytest.raises(ArithmeticError):
        Scalar(Z2, 3) / 4


def test_reduce_mod_p():
    Z5 = PLocalIntegers(5)
    assert reduce_mod_p(Scalar(Z5, Fraction(7, 3))) == Scalar(PrimeField(5), 4)  # 7 * 3^-1 = 7 * 2 = 14
    with pytest.raises(TypeError):
        reduce_mod_p(Scalar(QQ, 1))


def test_mixed_rings_raise():
    with pytest.raises(TypeError):
        Scalar(PrimeField(3), 1) + Scalar(PrimeField(5), 1)


def test_string_roundtrip():
    for k, v in ((QQ, Fraction(-3, 7)), (PrimeField(7), 5), (PLocalIntegers(3), Fraction(5, 4))):
        assert k.from_str(k.to_str(k.coerce(v))) == k.coerce(v)


@given(st.sampled_from(PRIMES), st.integers(), st.integers(), st.integers())
def test_prime_field_axioms(p, a, b, c):
    k = PrimeField(p)
    x, y, z = Scalar(k, a), Scalar(k, b), Scalar(k, c)
    assert (x + y) * z == x * z + y * z
    assert x - x == 0
    if x:
        assert (y * x) / x == y


@given(st.sampled_from(PRIMES), st.integers(-50, 50), st.integers(1, 50))
def test_plocal_residue_is_ring_map(p, n, d):
    k = PLocalIntegers(p)
    if d % p == 0:
        return
    a = Scalar(k, Fraction(n, d))
    b = Scalar(k, Fraction(d + 1, d) if d % p else 1)
    assert reduce_mod_p(a * b) == reduce_mod_p(a) * reduce_mod_p(b)
    assert reduce_mod_p(a + b) == reduce_mod_p(a) + reduce_mod_p(b)
    assert a.is_unit() == bool(reduce_mod_p(a))
