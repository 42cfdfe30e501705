from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infinity_dynamics.errors import InfinityDynamicsError, InvalidCenterError, NormalizationError
from infinity_dynamics.exactnum import QuadNumber
from infinity_dynamics.infnear import RELATIVE, BlowupTree, CurveEnd, FreeOn, SatelliteBetween

from conftest import blowup_choices, build_tree


def test_first_blowups(small_tree):
    tree, f, g = small_tree
    root = tree.node(tree.root)
    assert (root.b, root.alpha) == (1, 1)
    assert (tree.node(f).b, tree.node(f).alpha) == (1, 2)
    assert (tree.node(g).b, tree.node(g).alpha) == (2, Fraction(3, 2))
    assert tree.node(g).hosts == (tree.root, f)
    assert tree.edges() == [(tree.root, g), (g, f)]


def test_self_intersections_and_local_matrix(small_tree):
    tree, f, g = small_tree
    assert [tree.node(n).self_int for n in tree] == [-3, -2, -1]
    order, matrix = tree.local_intersection_matrix()
    assert order == [tree.root, f, g]
    assert matrix.tolist() == [[-3, 0, 1], [0, -2, 1], [1, 1, -1]]


def test_relative_tree_labels():
    tree = BlowupTree(mode=RELATIVE)
    f = tree.blow_up(FreeOn(tree.root))
    g = tree.blow_up(SatelliteBetween(tree.root, f))
    assert tree.node(tree.root).alpha == 0 and tree.node(tree.root).self_int is None
    assert tree.node(f).farey == (1, 1)
    assert tree.node(g).farey == (1, 2)
    assert tree.node(f).alpha == 1
    assert tree.thinness(g) == Fraction(3, 2)


def test_monomial_skewness(small_tree):
    tree, f, g = small_tree
    third = Fraction(1, 3)
    assert tree.monomial_skewness(tree.root, g, third, third) == Fraction(4, 3)
    assert tree.monomial_skewness(tree.root, g, 1, 0) == 1
    assert tree.monomial_skewness(tree.root, g, 0, Fraction(1, 2)) == Fraction(3, 2)
    assert tree.normalized_weights(tree.root, g, 1, 1) == (third, third)


def test_monomial_weights_must_be_normalized(small_tree):
    tree, f, g = small_tree
    with pytest.raises(NormalizationError):
        tree.monomial_point(tree.root, g, 1, 1)
    with pytest.raises(InvalidCenterError):
        tree.monomial_point(tree.root, f, Fraction(1, 2), Fraction(1, 2))


def test_change_of_root(small_tree):
    tree, f, g = small_tree
    relation = tree.change_root_relation(FreeOn(g))
    assert relation.ambient_skewness(Fraction(4)) == Fraction(5, 2)
    assert relation.ambient_multiplicity(3) == 6
    with pytest.raises(InvalidCenterError):
        tree.change_root_relation(SatelliteBetween(tree.root, g))


@given(blowup_choices, st.integers(min_value=0, max_value=1000),
       st.lists(st.integers(min_value=0, max_value=1000), max_size=15))
@settings(deadline=None, max_examples=100)
def test_relative_tree_above_a_free_point_matches_the_ambient_tree(choices, pick, steps):
    ambient = build_tree(choices)
    host = list(ambient)[pick % len(ambient)]
    relation = ambient.change_root_relation(FreeOn(host))

    relative = BlowupTree(mode=RELATIVE)
    image = {relative.root: host}
    first = relative.blow_up(FreeOn(relative.root))
    image[first] = ambient.blow_up(FreeOn(host))
    for value in steps:
        if value % 2:
            lower, upper = relative.edges()[(value // 2) % len(relative.edges())]
            new = relative.blow_up(SatelliteBetween(lower, upper))
            image[new] = ambient.blow_up(SatelliteBetween(image[lower], image[upper]))
        else:
            above = [n for n in relative if n != relative.root]
            on = above[(value // 2) % len(above)]
            new = relative.blow_up(FreeOn(on))
            image[new] = ambient.blow_up(FreeOn(image[on]))

    assert relative.node(first).alpha == 1
    assert ambient.node(image[first]).alpha == relation.offset + relation.scale
    for n, m in image.items():
        assert ambient.node(m).alpha == relation.ambient_skewness(relative.node(n).alpha)
        assert ambient.node(m).b == relation.ambient_multiplicity(relative.node(n).b)


def test_wedge_of_nodes(small_tree):
    tree, f, g = small_tree
    assert tree.wedge(f, g) == g
    assert tree.wedge(f, tree.root) == tree.root
    assert tree.wedge(CurveEnd(f), CurveEnd(g)) == g


def test_wedge_of_monomial_points_on_different_branches():
    tree = BlowupTree()
    a = tree.blow_up(FreeOn(tree.root))
    b = tree.blow_up(FreeOn(tree.root))
    half = Fraction(1, 2)
    p = tree.monomial_point(tree.root, a, half, half)
    q = tree.monomial_point(tree.root, b, half, half)
    assert p.alpha == q.alpha == Fraction(3, 2)
    assert tree.wedge(p, q) == tree.root
    assert tree.wedge(p, a) == p


def test_refine_until_node():
    tree = BlowupTree()
    f = tree.blow_up(FreeOn(tree.root))
    half = Fraction(1, 2)
    point = tree.monomial_point(tree.root, f, half, half)
    node = tree.refine_until_node(point)
    assert tree.node(node).b == 2 and tree.node(node).alpha == Fraction(3, 2)


def test_irrational_point_is_never_a_node():
    tree = BlowupTree()
    f = tree.blow_up(FreeOn(tree.root))
    t = QuadNumber.sqrt(2) - 1
    point = tree.monomial_point(tree.root, f, 1 - t, t)
    with pytest.raises(InfinityDynamicsError):
        tree.refine_until_node(point)


def test_frozen_tree_rejects_blowups(small_tree):
    tree, f, g = small_tree
    clone = tree.copy()
    tree.freeze()
    with pytest.raises(InfinityDynamicsError):
        tree.blow_up(FreeOn(f))
    clone.blow_up(FreeOn(f))
    assert len(clone) == 4 and len(tree) == 3


def test_dot_export(small_tree):
    tree, f, g = small_tree
    text = tree.to_dot()
    assert text.startswith('digraph "blowup_tree"')
    assert "b=2" in text and '"E0" -> "G"' in text


@given(blowup_choices)
@settings(deadline=None, max_examples=60)
def test_skewness_increments_along_edges(choices):
    tree = build_tree(choices)
    for u, v in tree.edges():
        lower, upper = tree.node(u), tree.node(v)
        assert upper.alpha - lower.alpha == Fraction(1, lower.b * upper.b)
    for n in tree:
        assert tree.node(n).b == tree.node(n).farey[1]


@given(blowup_choices)
@settings(deadline=None, max_examples=60)
def test_farey_determinant_is_the_segment_multiplicity(choices):
    tree = build_tree(choices)
    for u, v in tree.edges():
        assert tree.farey_determinant(u, v) == tree.node(v).multiplicity


@given(blowup_choices)
@settings(deadline=None, max_examples=60)
def test_adjacent_labels_are_farey_neighbours_above_simple_points(choices):
    tree = build_tree(choices, mode=RELATIVE, free_on_b1_only=True)
    for u, v in tree.edges():
        assert tree.farey_determinant(u, v) == 1


@given(blowup_choices)
@settings(deadline=None, max_examples=25)
def test_wedge_is_a_common_lower_bound(choices):
    tree = build_tree(choices)
    nodes = list(tree)
    for u in nodes:
        for v in nodes:
            w = tree.wedge(u, v)
            assert tree.is_ancestor(w, u) and tree.is_ancestor(w, v)
            assert tree.wedge(v, u) == w
