from math import comb

import pytest
from hypothesis import given, strategies as st

from bmg.lattice import GradedPolynomial, Weight, monomial_basis, primitive_mod_p, proportional_over_k, sign_normalize
from bmg.scalars import QQ, PLocalIntegers, PrimeField

coords = st.lists(st.integers(-6, 6), min_size=2, max_size=2).filter(any)


def test_sign_normalize_first_nonzero_positive():
    assert sign_normalize(Weight((0, -2, 1))).coords == (0, 2, -1)
    assert sign_normalize(Weight((3, -1))).coords == (3, -1)


def test_proportionality_depends_on_characteristic():
    a, b = Weight((1, 0)), Weight((1, 2))
    assert proportional_over_k(a, b, PrimeField(2))
    assert not proportional_over_k(a, b, PrimeField(3))
    assert not proportional_over_k(a, b, QQ)
    assert not proportional_over_k(a, b, PLocalIntegers(2))
    # a label that dies mod p is proportional to everything
    assert proportional_over_k(Weight((3, 3)), Weight((1, 0)), PrimeField(3))


def test_zero_label_rejected():
    with pytest.raises(ValueError):
        proportional_over_k(Weight((0, 0)), Weight((1, 0)), QQ)


def test_primitive_mod_p():
    assert primitive_mod_p(Weight((2, 3)), 2)
    assert not primitive_mod_p(Weight((2, 4)), 2)
    assert primitive_mod_p(Weight((2, 4)), 3)


@pytest.mark.parametrize("rank,deg", [(1, 0), (2, 2), (2, 6), (3, 4), (4, 8)])
def test_monomial_basis_size(rank, deg):
    basis = monomial_basis(rank, deg)
    assert len(basis) == comb(deg // 2 + rank - 1, rank - 1)
    assert all(sum(m) == deg // 2 for m in basis)
    assert list(basis) == sorted(basis, reverse=True)


def test_odd_degree_is_empty():
    assert monomial_basis(2, 3) == ()


@given(coords, coords)
def test_proportionality_symmetric(a, b):
    for k in (QQ, PrimeField(2), PrimeField(5)):
        assert proportional_over_k(Weight(tuple(a)), Weight(tuple(b)), k) == proportional_over_k(
            Weight(tuple(b)), Weight(tuple(a)), k)


@given(coords)
def test_sign_normalize_idempotent(a):
    w = sign_normalize(Weight(tuple(a)))
    assert sign_normalize(w) == w
    assert sign_normalize(-Weight(tuple(a))) == w


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_polynomial_ring_laws(a, b, c):
    k = PrimeField(5)
    x = GradedPolynomial.variable(k, 2, 0)
    y = GradedPolynomial.variable(k, 2, 1)
    f = x * a + y * b
    g = x * c + GradedPolynomial.constant(k, 2, b)
    assert f * g == g * f
    assert (f + g) * f == f * f + g * f
    assert (f * g).degrees() <= {2, 4}
