from fractions import Fraction

import pytest

from cupfix.engine import reach_distribution
from cupfix.forge import BadParameter, GadgetKind, build_gadget, enlarge
from cupfix.forge.fragments import fragment_to_instance
from cupfix.model import validate_instance
from cupfix.oracle import oracle_adaptive, oracle_nonadaptive
from cupfix.solver import best_response, solve

HALF = Fraction(1, 2)


def gadget_instance(kind, favorite, **kwargs):
    frag = build_gadget(kind, name="g", **kwargs)
    return fragment_to_instance(frag, favorite=favorite)


def test_existential_gadget_selects_either_assignment():
    assert solve(gadget_instance(GadgetKind.EXISTENTIAL, "xT.g")).t_opt == 1
    assert solve(gadget_instance(GadgetKind.EXISTENTIAL, "xF.g")).t_opt == 1
    assert solve(gadget_instance(GadgetKind.EXISTENTIAL, "q.g")).t_opt == 0


def test_universal_gadget_is_a_coin():
    inst = gadget_instance(GadgetKind.UNIVERSAL, "yT.g")
    dist = reach_distribution(inst.tree, inst.matrix)
    assert dist == {0: HALF, 1: HALF}


def test_clause_gadget_selects_any_literal():
    for j in (1, 2, 3):
        assert solve(gadget_instance(GadgetKind.CLAUSE, f"c{j}.g")).t_opt == 1
    assert solve(gadget_instance(GadgetKind.CLAUSE, "qc.g")).t_opt == 0


def test_first_round_clause_gadget():
    for fav in ("c1.g", "c2.g", "c3.g", "ens.g"):
        inst = gadget_instance(GadgetKind.CLAUSE_FIRST_ROUND, fav)
        response = best_response(inst)
        assert response.value == 1  # a round-one profile already settles it
        assert solve(inst).t_opt == 1


def test_first_round_gadget_oracles_coincide():
    # with all decisions effectively in round one, adaptivity buys nothing
    for fav in ("c1.g", "ens.g"):
        inst = gadget_instance(GadgetKind.CLAUSE_FIRST_ROUND, fav)
        assert oracle_adaptive(inst) == oracle_nonadaptive(inst)


def test_selection_gadget():
    items = [f"s{i}" for i in range(1, 6)]
    for item in items:
        inst = gadget_instance(GadgetKind.SELECTION, item, items=items)
        assert solve(inst).t_opt == 1
    inst = gadget_instance(GadgetKind.SELECTION, "sel.g", items=items)
    assert solve(inst).t_opt == 0


@pytest.mark.parametrize("length", [1, 2, 3, 4, 5, 6])
def test_randomize_gadget_reach(length):
    frag = build_gadget(GadgetKind.RANDOMIZE, name="g", length=length)
    inst = fragment_to_instance(frag, favorite=f"f1.g")
    dist = {inst.name_of(p): q for p, q in reach_distribution(inst.tree, inst.matrix).items()}
    expected = {}
    for i in range(1, length + 1):
        expected[f"f{i}.g"] = (
            Fraction(1, 2 ** (length - 1)) if i == length else Fraction(1, 2**i)
        )
    assert dist == expected
    assert sum(dist.values()) == 1


def test_enlarge_preserves_winner():
    frag = enlarge(build_gadget(GadgetKind.EXISTENTIAL, name="g"), 0, 3)
    assert len(frag.leaf_names()) == 8
    inst = fragment_to_instance(frag, favorite="xT.g")
    assert solve(inst).t_opt == 1

    uni = enlarge(build_gadget(GadgetKind.UNIVERSAL, name="g"), 3, 6)
    assert len(uni.leaf_names()) == 64
    inst = fragment_to_instance(uni, favorite="yT.g")
    dist = reach_distribution(inst.tree, inst.matrix)
    named = {inst.name_of(p): q for p, q in dist.items()}
    assert named == {"yT.g": HALF, "yF.g": HALF}


def test_enlarge_rejects_bad_rounds():
    frag = build_gadget(GadgetKind.CLAUSE, name="g")  # height 3
    with pytest.raises(BadParameter):
        enlarge(frag, 2, 4)
    with pytest.raises(BadParameter):
        enlarge(frag, -1, 5)


def test_build_gadget_parameter_errors():
    with pytest.raises(BadParameter):
        build_gadget(GadgetKind.SELECTION, name="g")
    with pytest.raises(BadParameter):
        build_gadget(GadgetKind.SELECTION, name="g", items=[])
    with pytest.raises(BadParameter):
        build_gadget(GadgetKind.RANDOMIZE, name="g")
    with pytest.raises(BadParameter):
        build_gadget(GadgetKind.RANDOMIZE, name="g", length=0)


def test_fragment_instances_validate_with_restricted_probabilities():
    kinds = [
        (GadgetKind.EXISTENTIAL, {}),
        (GadgetKind.UNIVERSAL, {}),
        (GadgetKind.CLAUSE, {}),
        (GadgetKind.CLAUSE_FIRST_ROUND, {}),
        (GadgetKind.SELECTION, {"items": ["a", "b", "c"]}),
        (GadgetKind.RANDOMIZE, {"length": 3}),
    ]
    allowed = {Fraction(0), HALF, Fraction(1)}
    for kind, kwargs in kinds:
        frag = build_gadget(kind, name="g", **kwargs)
        inst = fragment_to_instance(frag, favorite=frag.players[0])
        assert validate_instance(inst) == []
        for i in range(inst.n):
            for j in range(inst.n):
                if i != j:
                    assert inst.matrix.p(i, j) in allowed
