import pytest

from bmg.builders import (
    CartanMatrix,
    CoxeterElement,
    RootSystemData,
    WeylGroup,
    affine_grassmannian_graph,
    coweight_length,
    finite_bruhat_graph,
    io_graph,
)


@pytest.mark.parametrize("t,order,nroots,h", [
    ("A1", 2, 1, 2), ("A2", 6, 3, 3), ("B2", 8, 4, 4), ("G2", 12, 6, 6), ("A3", 24, 6, 4), ("B3", 48, 9, 6),
])
def test_root_data(t, order, nroots, h):
    A = CartanMatrix.from_type(t)
    assert len(WeylGroup(A).elements) == order
    R = RootSystemData(A)
    assert len(R.positive_roots) == nroots
    assert R.coxeter_number == h


def test_cartan_parsing():
    assert CartanMatrix.parse("B2").entries == ((2, -1), (-2, 2))
    assert CartanMatrix.parse("2,-1;-1,2") == CartanMatrix.from_type("A2")
    assert CartanMatrix.parse("[[2,-3],[-1,2]]") == CartanMatrix.from_type("G2")
    assert CartanMatrix.from_type("B2").transpose() == CartanMatrix.from_type("C2")


@pytest.mark.parametrize("t,nv,ne", [("A2", 6, 9), ("B2", 8, 16), ("G2", 12, 36), ("A3", 24, 72)])
def test_full_bruhat_graph_sizes(t, nv, ne):
    G = finite_bruhat_graph(CartanMatrix.from_type(t))
    assert (len(G.vertices), len(G.edges)) == (nv, ne)
    # every vertex of a full Bruhat graph meets one edge per positive root
    nroots = len(RootSystemData(CartanMatrix.from_type(t)).positive_roots)
    assert all(len(G.edges_at(v)) == nroots for v in G.vertices)


def test_lex_min_reduced_word_ids():
    W = WeylGroup(CartanMatrix.from_type("A3"))
    w = CoxeterElement.from_word(W, "2 3 1 2")
    assert w.id == "s2s1s3s2"
    assert w.length == 4


def test_interval_graph():
    G = finite_bruhat_graph(CartanMatrix.from_type("A3"), [2, 1, 3, 2])
    assert len(G.vertices) == 14
    assert len(G.edges_at("e")) == 5
    assert len(G.edges_at("s2s1s3s2")) == 4


def test_parabolic_quotient():
    G = finite_bruhat_graph(CartanMatrix.from_type("A2"), [1, 2], parabolic=[1])
    assert len(G.vertices) == 3 and len(G.edges) == 3
    with pytest.raises(ValueError):
        finite_bruhat_graph(CartanMatrix.from_type("A2"), [2, 1], parabolic=[1])


def test_affine_grassmannian_a1():
    A = CartanMatrix.from_type("A1")
    assert affine_grassmannian_graph(A, 0).vertices == ("[0]",)
    G = affine_grassmannian_graph(A, 1)
    assert [(e.tail, e.head, e.label.coords) for e in G.edges] == [("[0]", "[-2]", (1, 1))]
    G6 = affine_grassmannian_graph(A, 6)
    assert len(G6.vertices) == 7
    # labels alpha + n delta at [0]: n runs over -3..3 without 0
    assert sorted(e.label.coords[1] for e in G6.edges_at("[0]")) == [-3, -2, -1, 1, 2, 3]


def test_coweight_length():
    R = RootSystemData(CartanMatrix.from_type("A1"))
    assert [coweight_length(R, (m,)) for m in (0, 1, 2, -1, -2)] == [0, 1, 2, 0, 1]


def test_io_graph_roundtrip(tmp_path):
    G = finite_bruhat_graph(CartanMatrix.from_type("B2"))
    path = tmp_path / "g.json"
    io_graph("save", path, G)
    assert io_graph("load", path) == G
