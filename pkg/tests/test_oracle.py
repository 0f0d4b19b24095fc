import itertools
import random
from fractions import Fraction

import pytest

from cupfix.model import (
    Inner,
    Instance,
    Leaf,
    Player,
    SizeLimitExceeded,
    balanced_tree,
)
from cupfix.oracle import (
    _round_value,
    feasible_pairs,
    oracle_adaptive,
    oracle_best_profiles,
    oracle_nonadaptive,
)
from cupfix.skeleton import Action, StrategyProfile
from cupfix.solver import best_response

from corpus import matrix_from_upper, random_eight_instance


def test_two_player_tree():
    q = Fraction(3, 11)
    inst = Instance(
        players=(Player(0, "e*"), Player(1, "b")),
        tree=Inner(Leaf(0), Leaf(1)),
        matrix=matrix_from_upper(2, [q]),
        coalition=frozenset(),
        favorite=0,
        threshold=Fraction(1),
    )
    assert oracle_adaptive(inst) == q
    assert oracle_nonadaptive(inst) == q


def test_e1_oracles(e1):
    assert oracle_adaptive(e1) == Fraction(1, 2)
    assert oracle_nonadaptive(e1) == Fraction(1, 2)


def test_deterministic_instances_are_zero_one():
    rng = random.Random(17)
    menu = [Fraction(0), Fraction(1)]
    for _ in range(10):
        values = [rng.choice(menu) for _ in range(28)]
        inst = Instance(
            players=tuple(Player(i, f"p{i}") for i in range(8)),
            tree=balanced_tree(list(range(8))),
            matrix=matrix_from_upper(8, values),
            coalition=frozenset(rng.sample(range(8), 2)),
            favorite=rng.randrange(8),
            threshold=Fraction(1),
        )
        assert oracle_adaptive(inst) in (0, 1)


def test_size_limits():
    inst = Instance(
        players=tuple(Player(i, f"p{i}") for i in range(32)),
        tree=balanced_tree(list(range(32))),
        matrix=matrix_from_upper(32, [Fraction(1, 2)] * (32 * 31 // 2)),
        coalition=frozenset({0}),
        favorite=1,
        threshold=Fraction(1, 2),
    )
    with pytest.raises(SizeLimitExceeded):
        oracle_adaptive(inst)
    with pytest.raises(SizeLimitExceeded):
        oracle_nonadaptive(inst)
    # pair limit separately from the size limit
    small = Instance(
        players=tuple(Player(i, f"p{i}") for i in range(8)),
        tree=balanced_tree(list(range(8))),
        matrix=matrix_from_upper(8, [Fraction(1, 2)] * 28),
        coalition=frozenset(range(4)),
        favorite=0,
        threshold=Fraction(1, 2),
    )
    with pytest.raises(SizeLimitExceeded):
        oracle_nonadaptive(small)


def test_best_profiles_e1(e1):
    # both round-one choices reach the optimum: after a first-round win the
    # coalition player still throws the final
    profiles = oracle_best_profiles(e1)
    c = next(iter(e1.coalition))
    assert profiles == {
        StrategyProfile(((c, Action.PLAY),)),
        StrategyProfile(((c, Action.THROW),)),
    }


def test_best_response_profile_in_oracle_set(e1, eight_corpus):
    for inst in [e1] + list(eight_corpus[:25]):
        assert best_response(inst).profile in oracle_best_profiles(inst)


def test_nonadaptive_never_exceeds_adaptive(eight_corpus):
    for inst in eight_corpus[:40]:
        assert oracle_nonadaptive(inst) <= oracle_adaptive(inst)


def test_nonadaptive_matches_enumeration_on_small():
    rng = random.Random(23)
    menu = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)]
    for _ in range(40):
        values = [rng.choice(menu) for _ in range(6)]
        inst = Instance(
            players=tuple(Player(i, f"p{i}") for i in range(4)),
            tree=balanced_tree(list(range(4))),
            matrix=matrix_from_upper(4, values),
            coalition=frozenset(rng.sample(range(4), rng.choice([1, 2]))),
            favorite=rng.randrange(4),
            threshold=Fraction(1, 2),
        )
        pairs = feasible_pairs(inst)
        best = None
        for actions in itertools.product((Action.PLAY, Action.THROW), repeat=len(pairs)):
            table = dict(zip(pairs, actions))
            if any(
                table.get((a, b)) == Action.THROW and table.get((b, a)) == Action.THROW
                for (a, b) in pairs
            ):
                continue
            value = _round_value(
                inst.tree, inst.matrix, frozenset(inst.coalition), inst.favorite, table, {}
            )
            if best is None or value > best:
                best = value
        assert oracle_nonadaptive(inst) == best


def mirror(tree):
    if isinstance(tree, Leaf):
        return tree
    return Inner(mirror(tree.right), mirror(tree.left))


def test_oracle_mirror_invariance():
    rng = random.Random(29)
    for _ in range(15):
        inst = random_eight_instance(rng, balanced=bool(rng.getrandbits(1)))
        mirrored = Instance(
            inst.players,
            mirror(inst.tree),
            inst.matrix,
            inst.coalition,
            inst.favorite,
            inst.threshold,
        )
        assert oracle_adaptive(inst) == oracle_adaptive(mirrored)


def test_empty_coalition_oracles_coincide():
    rng = random.Random(37)
    inst = random_eight_instance(rng, balanced=True)
    stripped = Instance(
        inst.players, inst.tree, inst.matrix, frozenset(), inst.favorite, inst.threshold
    )
    assert oracle_nonadaptive(stripped) == oracle_adaptive(stripped)
