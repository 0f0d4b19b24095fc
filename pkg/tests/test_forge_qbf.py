from fractions import Fraction

import pytest

from cupfix.forge import (
    BadParameter,
    QbfFormula,
    eval_qbf,
    parse_qbf,
    qbf_to_instance,
    trim_to_generalized,
)
from cupfix.model import (
    MissingRoleAnnotations,
    SizeLimitExceeded,
    is_balanced,
    tree_leaves,
    validate_instance,
)
from cupfix.solver import decide

X, NX = ("x1", True), ("x1", False)
Y, NY = ("x2", True), ("x2", False)
Z, NZ = ("x3", True), ("x3", False)


def exists(*clauses):
    variables = sorted({v for clause in clauses for v, _ in clause})
    return QbfFormula.make([("E", variables)], clauses)


def test_eval_qbf_basics():
    assert eval_qbf(exists((X, X, X)))
    assert not eval_qbf(exists((X, X, X), (NX, NX, NX)))
    # exists x forall y exists z: (x|y|z) & (x|!y|!z)
    f = QbfFormula.make(
        [("E", ["x1"]), ("A", ["x2"]), ("E", ["x3"])],
        [(X, Y, Z), (X, NY, NZ)],
    )
    # brute truth: x = True satisfies both clauses outright
    assert eval_qbf(f)
    g = QbfFormula.make([("E", ["x1"]), ("A", ["x2"]), ("E", ["x3"])], [(Y, Y, Y)])
    assert not eval_qbf(g)


def test_eval_qbf_limit():
    variables = [f"v{i}" for i in range(25)]
    f = QbfFormula.make([("E", variables)], [((variables[0], True),) * 3])
    with pytest.raises(SizeLimitExceeded):
        eval_qbf(f)


def test_formula_normalization():
    # leading universal block gets an existential pad in front
    f = QbfFormula.make([("A", ["y"]), ("E", ["x"])], [(("x", True), ("y", True), ("y", False))])
    assert f.blocks[0][0] == "E" and len(f.blocks) % 2 == 1
    # even block count gets padded to odd
    g = QbfFormula.make([("E", ["a"]), ("A", ["b"])], [(("a", True),) * 3])
    assert len(g.blocks) == 3
    # adjacent equal quantifiers merge
    h = QbfFormula.make([("E", ["a"]), ("E", ["b"])], [(("a", True), ("b", True), ("b", True))])
    assert len(h.blocks) == 1 and set(h.blocks[0][1]) == {"a", "b"}


def test_formula_invariants_enforced():
    with pytest.raises(BadParameter):
        QbfFormula((("E", ("a",)),), (((("a", True),) * 2),))
    with pytest.raises(BadParameter):
        QbfFormula((("E", ("a",)),), ((("b", True), ("a", True), ("a", True)),))


def test_parse_qbf_dimacs_like():
    text = """c example
p cnf 3 2
e 1 2 0
a 3 0
1 -2 3 0
-1 2 -3 0
"""
    f = parse_qbf(text)
    assert [q for q, _ in f.blocks] == ["E", "A", "E"]  # padded to odd
    assert f.clauses[0] == (("x1", True), ("x2", False), ("x3", True))


def test_qbf_instance_structure():
    f = exists((X, Y, Z))
    inst = qbf_to_instance(f)
    assert validate_instance(inst) == []
    assert is_balanced(inst.tree)
    assert inst.threshold == 1
    assert len(inst.coalition) == 3 + 1  # one per variable, one per clause
    allowed = {Fraction(0), Fraction(1, 2), Fraction(1)}
    import random

    rng = random.Random(1)
    for _ in range(300):
        i, j = rng.randrange(inst.n), rng.randrange(inst.n)
        if i != j:
            assert inst.matrix.p(i, j) in allowed


def test_qbf_decide_small_cases():
    sat = exists((X, Y, Z), (NX, Y, NZ))
    unsat = exists((X, X, X), (NX, NX, NX))
    assert decide(qbf_to_instance(sat)) is True
    assert decide(qbf_to_instance(unsat)) is False


def test_qbf_size_cap():
    f = exists((X, Y, Z))
    with pytest.raises(SizeLimitExceeded):
        qbf_to_instance(f, size_cap=64)


def test_trim_preserves_decision_and_shrinks():
    for formula in [exists((X, Y, Z)), exists((X, X, X), (NX, NX, NX))]:
        inst = qbf_to_instance(formula)
        trimmed = trim_to_generalized(inst)
        assert validate_instance(trimmed) == []
        assert decide(trimmed) == decide(inst) == eval_qbf(formula)
        assert len(tree_leaves(trimmed.tree)) <= len(tree_leaves(inst.tree)) / 2
        # idempotent on the already trimmed instance modulo fresh dummies
        again = trim_to_generalized(trimmed)
        assert decide(again) == decide(trimmed)


def test_trim_requires_roles(e1):
    with pytest.raises(MissingRoleAnnotations):
        trim_to_generalized(e1)


def test_trim_no_dummies_is_identity(e1):
    annotated = type(e1)(
        e1.players,
        e1.tree,
        e1.matrix,
        e1.coalition,
        e1.favorite,
        e1.threshold,
        roles={0: "favorite"},
    )
    assert trim_to_generalized(annotated) is annotated


def test_declared_uniform_groups_are_interchangeable():
    # members of a declared-uniform group must have identical rows against
    # every third player; sampled triples over a generated instance
    import random

    inst = qbf_to_instance(exists((X, Y, Z)))
    classes = [c for c in inst.matrix.interchange_classes() if len(c) > 1]
    assert classes, "generated instances collapse their dummy pool"
    rng = random.Random(5)
    for members in classes:
        for _ in range(2000):
            y1, y2 = rng.sample(members, 2)
            z = rng.randrange(inst.n)
            if z in (y1, y2):
                continue
            assert inst.matrix.p(y1, z) == inst.matrix.p(y2, z)


def test_alternating_instance_matches_eval():
    f = QbfFormula.make(
        [("E", ["x1"]), ("A", ["x2"]), ("E", ["x3"])], [(X, Y, Z)]
    )
    inst = qbf_to_instance(f)
    assert inst.n == 65536
    assert decide(inst) == eval_qbf(f) is True
