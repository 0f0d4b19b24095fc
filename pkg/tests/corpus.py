"""Shared instance corpus used across the test suite.

The exhaustive 4-player corpus and the seeded 8-player random corpus are
the substrate of the oracle-equivalence, dominance and martingale checks;
the parameters here are pinned so every run exercises the same instances.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from pathlib import Path

from cupfix.model import (
    DenseMatrix,
    Inner,
    Instance,
    Leaf,
    Player,
    balanced_tree,
    parse_instance,
)

INSTANCE_DIR = Path(__file__).resolve().parent.parent / "instances"

FOUR_PLAYER_VALUES = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1))
EIGHT_PLAYER_SEED = 20260810
EIGHT_PLAYER_MENU = (
    Fraction(0),
    Fraction(1, 4),
    Fraction(1, 3),
    Fraction(1, 2),
    Fraction(2, 3),
    Fraction(3, 4),
    Fraction(1),
)


def e1_instance() -> Instance:
    return parse_instance((INSTANCE_DIR / "e1.json").read_text())


def matrix_from_upper(n: int, values) -> DenseMatrix:
    it = iter(values)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            p = next(it)
            rows[i][j] = p
            rows[j][i] = 1 - p
    return DenseMatrix(rows)


def four_player_corpus():
    """Every balanced 4-player instance over {0, 1/4, 1/2, 1} and |C| <= 2.

    Favorite pinned to player 0, threshold to 1/2; neither affects the
    value equalities the corpus is used for.
    """
    ids = [0, 1, 2, 3]
    players = tuple(Player(i, name) for i, name in enumerate(["e*", "a", "b", "c"]))
    tree = balanced_tree(ids)
    subsets = [
        frozenset(s) for k in range(3) for s in itertools.combinations(ids, k)
    ]
    for values in itertools.product(FOUR_PLAYER_VALUES, repeat=6):
        matrix = matrix_from_upper(4, values)
        for coalition in subsets:
            yield Instance(players, tree, matrix, coalition, 0, Fraction(1, 2))


def random_tree(players, rng):
    if len(players) == 1:
        return Leaf(players[0])
    cut = rng.randint(1, len(players) - 1)
    return Inner(random_tree(players[:cut], rng), random_tree(players[cut:], rng))


def random_eight_instance(rng, balanced: bool) -> Instance:
    ids = list(range(8))
    perm = ids[:]
    rng.shuffle(perm)
    tree = balanced_tree(perm) if balanced else random_tree(perm, rng)
    values = [rng.choice(EIGHT_PLAYER_MENU) for _ in range(28)]
    matrix = matrix_from_upper(8, values)
    coalition = frozenset(rng.sample(ids, rng.choice([0, 1, 1, 2, 2, 3, 3])))
    favorite = rng.randrange(8)
    players = tuple(Player(i, f"p{i}") for i in ids)
    return Instance(players, tree, matrix, coalition, favorite, Fraction(1, 2))


def eight_player_corpus(count: int = 200):
    """Seeded random corpus: half balanced, half generalized, |C| <= 3."""
    rng = random.Random(EIGHT_PLAYER_SEED)
    out = []
    for i in range(count):
        out.append(random_eight_instance(rng, balanced=(i % 2 == 0)))
    return out
