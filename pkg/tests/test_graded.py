import pytest
from hypothesis import given, settings, strategies as st

from bmg.graded import (
    A4bViolation,
    DegreeBoundError,
    DegreewiseModule,
    FreeGradedModule,
    direct_sum,
    expand_free,
    generated_submodule,
    generator_polynomial,
    minimal_generators,
    projective_cover,
    quotient_by_linear_form,
    torsion_report,
)
from bmg.lattice import Weight, embed_weight
from bmg.linalg import canonical_basis, identity, image_basis
from bmg.scalars import QQ, PLocalIntegers, PrimeField

W = (0, 8)


def test_expand_free_dims():
    M = expand_free(FreeGradedModule(QQ, 2, (0, 2)), W)
    assert M.dims == {0: 1, 2: 3, 4: 5, 6: 7, 8: 9}


def test_odd_generator_degree_rejected():
    with pytest.raises(ValueError):
        FreeGradedModule(QQ, 2, (1,))


def test_shift_moves_generators_down():
    assert FreeGradedModule(QQ, 2, (0, 4)).shift(1).degrees == (-2, 2)


def test_quotient_by_linear_form_dims():
    F = FreeGradedModule(QQ, 3, (0,))
    Q, pi = quotient_by_linear_form(F, embed_weight(Weight((1, 1, 0)), QQ), W)
    # S / alpha S is a polynomial ring in two variables
    assert Q.dims == {0: 1, 2: 2, 4: 3, 6: 4, 8: 5}
    assert all(pi.source.dim(d) >= Q.dim(d) for d in Q.degrees())


def test_quotient_needs_unit_coordinate():
    Z2 = PLocalIntegers(2)
    with pytest.raises(A4bViolation):
        quotient_by_linear_form(FreeGradedModule(Z2, 2, (0,)), embed_weight(Weight((2, 4)), Z2), W)


def test_maximal_ideal_has_rank_many_generators():
    M = expand_free(FreeGradedModule(QQ, 3, (0,)), W)
    gens = [(2, [1 if j == i else 0 for j in range(3)]) for i in range(3)]
    I, _ = generated_submodule(M, gens)
    assert generator_polynomial(I) == {1: 3}


def test_plocal_nakayama_counts_p_multiples():
    Z3 = PLocalIntegers(3)
    M = expand_free(FreeGradedModule(Z3, 2, (0,)), W)
    # the ideal (3, x) needs two generators over Z_(3), the ideal (3) one
    I, _ = generated_submodule(M, [(0, [3]), (2, [1, 0])])
    assert generator_polynomial(I) == {0: 1, 1: 1}
    J, _ = generated_submodule(M, [(0, [3])])
    assert generator_polynomial(J) == {0: 1}


def test_audit_flags_top_degree_generator():
    M = expand_free(FreeGradedModule(QQ, 1, (0,)), (0, 4))
    I, _ = generated_submodule(M, [(4, [1])])
    with pytest.raises(DegreeBoundError):
        minimal_generators(I, audit=True)
    assert generator_polynomial(I) == {2: 1}


def test_torsion_report_invariant_factors():
    Z2 = PLocalIntegers(2)
    rep = torsion_report({0: ([[4, 0], [0, 6]], 2), 2: ([[1]], 1)}, Z2)
    assert rep.factors == {0: [2, 4]}
    assert torsion_report({0: ([[4]], 1)}, QQ).is_empty()


def test_direct_sum_dims():
    A = expand_free(FreeGradedModule(QQ, 2, (0,)), W)
    B = expand_free(FreeGradedModule(QQ, 2, (2,)), W)
    assert direct_sum([A, B]).dims == {d: A.dim(d) + B.dim(d) for d in A.degrees()}


def test_json_roundtrip():
    k = PrimeField(3)
    Q, _ = quotient_by_linear_form(FreeGradedModule(k, 2, (0,)), embed_weight(Weight((1, 2)), k), W)
    R = DegreewiseModule.from_json(k, 2, W, Q.to_json())
    assert R.dims == Q.dims and R.to_json() == Q.to_json()


elements = st.lists(
    st.tuples(st.sampled_from([0, 2, 4]), st.lists(st.integers(-2, 2), min_size=3, max_size=3)),
    min_size=1, max_size=4)


@settings(max_examples=40, deadline=None)
@given(elements, st.sampled_from([QQ, PrimeField(2), PrimeField(3), PLocalIntegers(2)]))
def test_projective_cover_is_surjective_and_minimal(elems, k):
    M = expand_free(FreeGradedModule(k, 2, (0,)), W)
    gens = []
    for d, coeffs in elems:
        n = M.dim(d)
        gens.append((d, [k.coerce(c) for c in (coeffs + [0] * n)[:n]]))
    I, _ = generated_submodule(M, gens)
    F, f = projective_cover(I)
    assert F.ngens <= len(gens)
    for d in I.degrees():
        n = I.dim(d)
        if n:
            # the cover is onto: its columns span the whole lattice I_d
            basis, _ = image_basis(f.mats[d], k, f.source.dim(d))
            assert basis == canonical_basis(identity(k, n), k, n)[0]
