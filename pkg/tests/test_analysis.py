import pytest
from hypothesis import given, settings, strategies as st

from bmg.analysis import (
    Refusal,
    is_palindromic,
    kl_table,
    poly_str,
    self_duality_check,
    sl2_tilting_oracle,
    smooth_locus,
    tilting_character,
    torsion_audit,
)
from bmg.builders import CartanMatrix, WeylGroup, finite_bruhat_graph
from bmg.engine import braden_macpherson
from bmg.scalars import QQ, PLocalIntegers, PrimeField

_tables = {}


def table(t):
    if t not in _tables:
        _tables[t] = kl_table(CartanMatrix.from_type(t))
    return _tables[t]


def test_kl_frozen_a3():
    K = table("A3")
    assert K.get("e", "s2s1s3s2") == (1, 1)
    assert K.get("s2", "s2s1s3s2") == (1, 1)
    assert K.get("s1", "s2s1s3s2") == (1,)
    assert K.get("s2", "s1") == ()  # not comparable
    nontrivial = sorted((x, w) for (x, w), p in K.table.items() if p != (1,))
    # the two singular Schubert varieties of S4
    assert nontrivial == [
        ("e", "s1s2s3s2s1"), ("e", "s2s1s3s2"), ("s1", "s1s2s3s2s1"),
        ("s1s3", "s1s2s3s2s1"), ("s2", "s2s1s3s2"), ("s3", "s1s2s3s2s1"),
    ]
    assert all(K.get(x, w) == (1, 1) for x, w in nontrivial)


@pytest.mark.parametrize("t", ["B2", "G2"])
def test_kl_dihedral_all_one(t):
    assert all(p == (1,) for p in table(t).table.values())


def test_kl_interval_top():
    K = kl_table("A3", "2 1 3 2")
    assert K.top == "s2s1s3s2"
    assert sum(1 for (x, w) in K.table if w == K.top) == 14
    assert K.to_tsv().splitlines()[0] == "x\tw\tP"


def test_poly_str():
    assert poly_str((1, 1)) == "1 + q"
    assert poly_str((1, 0, 2)) == "1 + 2q^2"
    assert poly_str(()) == "0"


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["A2", "B2", "A3"]), st.data())
def test_kl_degree_bound(t, data):
    K = table(t)
    W = WeylGroup(CartanMatrix.from_type(t))
    lengths = {W.element_id(g): W.length[g] for g in W.elements}
    (x, w), p = data.draw(st.sampled_from(sorted(K.table.items())))
    assert p[0] == 1
    if x != w:
        assert 2 * (len(p) - 1) <= lengths[w] - lengths[x] - 1
    else:
        assert p == (1,)


def test_smooth_locus_a3_singular():
    G = finite_bruhat_graph(CartanMatrix.from_type("A3"))
    rep = smooth_locus(G, QQ, "s2s1s3s2", "compare", l=4)
    assert rep.symmetric_difference == []
    assert "e" not in rep.stalks and "s2" not in rep.stalks
    assert len(rep.stalks) == 12
    assert smooth_locus(G, QQ, "s2s1s3s2", "edges").edges == rep.edges


def test_smooth_compare_refuses_non_gkm():
    G = finite_bruhat_graph(CartanMatrix.from_type("B2"))
    with pytest.raises(Refusal) as err:
        smooth_locus(G, PrimeField(2), "s1s2s1s2", "compare")
    assert err.value.reason["violation"]["kind"] == "proportional labels"
    # the stalk method still runs
    assert smooth_locus(G, PrimeField(2), "s1s2s1s2", "stalks").stalks


def test_smooth_compare_refuses_wrong_degree():
    G = finite_bruhat_graph(CartanMatrix.from_type("A2"))
    with pytest.raises(Refusal):
        smooth_locus(G, QQ, "s1s2s1", "compare", l=2)


def test_self_duality():
    G = finite_bruhat_graph(CartanMatrix.from_type("A2"))
    S = braden_macpherson(G, QQ, "s1s2s1")
    assert self_duality_check(S, 3).ok
    assert not self_duality_check(S, 2).ok
    assert is_palindromic({0: 1, 1: 2, 2: 1}, 2)
    assert not is_palindromic({0: 1, 1: 2}, 1)


def test_sl2_oracle_frozen():
    assert sl2_tilting_oracle(6, 5) == {6: 1, 4: 1, 2: 2, 0: 2, -2: 2, -4: 1, -6: 1}
    assert sl2_tilting_oracle(4, 5) == {4: 1, 2: 1, 0: 1, -2: 1, -4: 1}


def test_tilting_refusal():
    with pytest.raises(Refusal) as err:
        tilting_character("A1", (2,), 3)
    assert err.value.reason["h"] == 2
    forced = tilting_character("A1", (2,), 3, force=True)
    assert {m[0]: n for m, n in forced.mult.items()} == sl2_tilting_oracle(2, 3)
    with pytest.raises(ValueError):
        tilting_character("A1", (-1,), 5)


@pytest.mark.parametrize("lam", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)])
def test_a2_tilting_in_lowest_alcove_is_weyl_module(lam):
    # p = 5 and a + b + 2 <= 5: T(lambda) is the Weyl module, of Weyl dimension
    a, b = lam
    T = tilting_character("A2", lam, 5)
    assert sum(T.mult.values()) == (a + 1) * (b + 1) * (a + b + 2) // 2
    assert T.mult[lam] == 1


def test_torsion_audit():
    G = finite_bruhat_graph(CartanMatrix.from_type("B2"))
    audit = torsion_audit(braden_macpherson(G, PLocalIntegers(2), "s1s2s1s2"))
    assert set(audit) == set(G.vertices)
    assert all(r.is_empty() for r in audit.values())
    with pytest.raises(TypeError):
        torsion_audit(braden_macpherson(G, QQ, "e"))
