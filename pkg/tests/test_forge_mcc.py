from fractions import Fraction

import pytest

from cupfix.cover import minimum_random_game_cover
from cupfix.forge import (
    BadParameter,
    ColoredGraph,
    find_multicolored_clique,
    mcc_to_instance,
    parse_colored_graph,
)
from cupfix.model import SizeLimitExceeded, is_balanced, validate_instance
from cupfix.solver import decide


def test_make_pads_classes_and_validates():
    g = ColoredGraph.make([["a"], ["b", "c"]], [("a", "b")])
    assert [len(cls) for cls in g.classes] == [2, 2]
    with pytest.raises(BadParameter):
        ColoredGraph.make([["a"], ["a"]], [])
    with pytest.raises(BadParameter):
        ColoredGraph.make([["a", "b"], ["c"]], [("a", "b")])  # same color
    with pytest.raises(BadParameter):
        ColoredGraph.make([["a"], ["b"]], [("a", "z")])


def test_parse_colored_graph():
    g = parse_colored_graph("# demo\nc 1 a\nc 1 b\nc 2 x\ne a x\n")
    assert g.classes[0] == ("a", "b")
    # the second class is padded to equal width with a fresh isolated vertex
    assert g.classes[1][0] == "x" and len(g.classes[1]) == 2
    assert g.edges == frozenset({("a", "x")})


def test_find_clique_basics():
    complete = ColoredGraph.make(
        [["a", "b"], ["c", "d"]],
        [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
    )
    assert find_multicolored_clique(complete)
    empty = ColoredGraph.make([["a", "b"], ["c", "d"]], [])
    assert not find_multicolored_clique(empty)
    triangle_free = ColoredGraph.make(
        [["a1", "a2"], ["b1", "b2"], ["c1", "c2"]],
        [("a1", "b1"), ("b1", "c1"), ("a2", "c1")],
    )
    assert not find_multicolored_clique(triangle_free)


def test_find_clique_limit():
    big = ColoredGraph.make([[f"a{i}" for i in range(11)], [f"b{i}" for i in range(11)]], [])
    with pytest.raises(SizeLimitExceeded):
        find_multicolored_clique(big)


def test_instance_rejects_single_color():
    with pytest.raises(BadParameter):
        mcc_to_instance(ColoredGraph.make([["a", "b"]], []))


def test_two_color_instances_exhaustive():
    verts = [["a", "b"], ["c", "d"]]
    possible = [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")]
    for mask in range(16):
        edges = [e for i, e in enumerate(possible) if mask & (1 << i)]
        g = ColoredGraph.make(verts, edges)
        inst = mcc_to_instance(g)
        assert validate_instance(inst) == []
        assert not is_balanced(inst.tree) or inst.n <= 2
        assert decide(inst) == find_multicolored_clique(g)
        assert len(minimum_random_game_cover(inst)) == 2


def test_three_color_instance():
    g = ColoredGraph.make(
        [["a1", "a2", "a3"], ["b1", "b2", "b3"], ["c1", "c2", "c3"]],
        [("a1", "b1"), ("b1", "c1"), ("a1", "c1"), ("a2", "b3"), ("b2", "c3")],
    )
    inst = mcc_to_instance(g)
    assert validate_instance(inst) == []
    assert decide(inst) is True
    assert find_multicolored_clique(g) is True
    cover = minimum_random_game_cover(inst)
    assert sorted(inst.name_of(p) for p in cover) == ["rand.1", "rand.2"]
    # coalition size: one selector per color plus one per color pair
    assert len(inst.coalition) == 3 + 3


def test_generated_probabilities_stay_in_menu():
    g = ColoredGraph.make([["a", "b"], ["c", "d"]], [("a", "c"), ("b", "d")])
    inst = mcc_to_instance(g)
    allowed = {Fraction(0), Fraction(1, 2), Fraction(1)}
    for i in range(inst.n):
        for j in range(inst.n):
            if i != j:
                assert inst.matrix.p(i, j) in allowed
                assert inst.matrix.p(i, j) + inst.matrix.p(j, i) == 1
