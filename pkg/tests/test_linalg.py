from fractions import Fraction

from hypothesis import given, settings, strategies as st

from bmg.linalg import (
    Solver,
    canonical_basis,
    image_basis,
    kernel_basis,
    matmul,
    matvec,
    rank,
    residue_rank,
    smith_normal_form,
    solve_linear,
)
from bmg.scalars import QQ, PLocalIntegers, PrimeField

RINGS = [QQ, PrimeField(2), PrimeField(5), PLocalIntegers(2), PLocalIntegers(3)]


def mat(ring, rows):
    return [[ring.coerce(x) for x in r] for r in rows]


matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=m, max_size=m)))


def test_smith_normal_form_frozen():
    # [[2, 4], [6, 8]] over Z_(2): invariant factors 2 and 4 (det -8)
    k = PLocalIntegers(2)
    a = mat(k, [[2, 4], [6, 8]])
    U, D, V = smith_normal_form(a, k, 2)
    assert [D[0][0], D[1][1]] == [2, 4]
    assert D[0][1] == D[1][0] == 0
    assert matmul(k, matmul(k, U, a), V) == D


def test_kernel_is_saturated_over_plocal():
    k = PLocalIntegers(3)
    a = mat(k, [[3, 6]])
    ker = kernel_basis(a, k, 2)
    assert len(ker) == 1
    assert residue_rank(ker, k, 2) == 1  # primitive, not 3 * (-2, 1)


def test_image_not_saturated_over_plocal():
    k = PLocalIntegers(3)
    basis, _ = image_basis(mat(k, [[3], [6]]), k, 1)
    assert rank(basis, k, 2) == 1
    assert residue_rank(basis, k, 2) == 0


def test_canonical_basis_unique():
    k = QQ
    b1, _ = canonical_basis(mat(k, [[1, 2, 3], [0, 1, 1]]), k, 3)
    b2, _ = canonical_basis(mat(k, [[1, 3, 4], [2, 4, 6]]), k, 3)
    assert b1 == b2


@settings(max_examples=60, deadline=None)
@given(matrices, st.sampled_from(RINGS))
def test_rank_nullity_and_kernel(rows, k):
    a = mat(k, rows)
    n = len(rows[0])
    ker = kernel_basis(a, k, n)
    assert rank(a, k, n) + len(ker) == n
    for v in ker:
        assert all(x == 0 for x in matvec(k, a, v))


@settings(max_examples=60, deadline=None)
@given(matrices, st.sampled_from(RINGS), st.data())
def test_solver_agrees_with_solve_linear(rows, k, data):
    a = mat(k, rows)
    n = len(rows[0])
    x0 = [k.coerce(data.draw(st.integers(-3, 3))) for _ in range(n)]
    b = matvec(k, a, x0)
    x = Solver(a, k, n).solve(b)
    assert x is not None and matvec(k, a, x) == b
    assert solve_linear(a, b, k, n) is not None


def test_solver_reports_unsolvable():
    k = PLocalIntegers(2)
    a = mat(k, [[2]])
    assert Solver(a, k, 1).solve([k.coerce(1)]) is None
    assert Solver(a, QQ, 1).solve([Fraction(1)]) == [Fraction(1, 2)]


@settings(max_examples=40, deadline=None)
@given(matrices, st.sampled_from([PLocalIntegers(2), PLocalIntegers(3)]))
def test_snf_diagonal_divisibility(rows, k):
    a = mat(k, rows)
    n = len(rows[0])
    U, D, V = smith_normal_form(a, k, n)
    assert matmul(k, matmul(k, U, a), V, n) == D
    diag = [D[i][i] for i in range(min(len(rows), n))]
    vals = [k.valuation(d) if d else 10**9 for d in diag]
    assert vals == sorted(vals)
