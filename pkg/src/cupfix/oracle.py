"""Ground-truth evaluators by exhaustive recursion over residual trees.

These are the independent side of every solver cross-check: they never
share code with the configuration DP.  ``oracle_adaptive`` maximizes a
fresh profile per residual tree (full-information play);
``oracle_nonadaptive`` maximizes over pre-committed per-opponent decision
tables.  Both are exact rationals and guarded by size limits because the
recursion is exponential.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .engine import advance_round, current_pairings
from .model import (
    Instance,
    Leaf,
    ProbabilityMatrix,
    SizeLimitExceeded,
    TournamentTree,
    ValidationError,
    validate_instance,
)
from .skeleton import Action, StrategyProfile

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_SIZE_LIMIT = 16
DEFAULT_PAIR_LIMIT = 24


@dataclass(frozen=True)
class NonAdaptiveStrategy:
    """Pre-committed decisions: (coalition player, opponent) -> action."""

    decisions: tuple[tuple[tuple[int, int], Action], ...]

    @property
    def mapping(self) -> dict[tuple[int, int], Action]:
        return dict(self.decisions)


def _tree_key(tree: TournamentTree) -> tuple:
    leaves = []
    depths = []
    stack = [(tree, 0)]
    while stack:
        node, d = stack.pop()
        if isinstance(node, Leaf):
            leaves.append(node.player)
            depths.append(d)
        else:
            stack.append((node.right, d + 1))
            stack.append((node.left, d + 1))
    return (tuple(leaves), tuple(depths))


def _round_value(
    tree: TournamentTree,
    matrix: ProbabilityMatrix,
    coalition: frozenset[int],
    favorite: int,
    pinned: Optional[dict[tuple[int, int], Action]],
    memo: dict,
    collect_profiles: Optional[list] = None,
) -> Fraction:
    """Max over this round's free decisions of the expected continuation.

    ``pinned`` forces per-(player, opponent) decisions; free decisions are
    chosen adaptively.  With every relevant pair pinned this is plain
    outcome-tree summation for a fixed non-adaptive strategy.
    """
    if isinstance(tree, Leaf):
        return ONE if tree.player == favorite else ZERO
    key = _tree_key(tree)
    if collect_profiles is None and key in memo:
        return memo[key]

    games = current_pairings(tree)
    free_slots: list[tuple[int, int, int]] = []  # (game idx, player, opponent)
    forced: dict[tuple[int, int], Action] = {}
    for idx, g in enumerate(games):
        for player, opponent in ((g.player_a, g.player_b), (g.player_b, g.player_a)):
            if player in coalition:
                act = pinned.get((player, opponent)) if pinned else None
                if act is None:
                    free_slots.append((idx, player, opponent))
                else:
                    forced[(idx, player)] = act

    best: Optional[Fraction] = None
    for chosen in itertools.product((Action.PLAY, Action.THROW), repeat=len(free_slots)):
        actions = dict(forced)
        for (idx, player, _), act in zip(free_slots, chosen):
            actions[(idx, player)] = act
        admissible = True
        options: list[list[tuple[int, Fraction]]] = []
        for idx, g in enumerate(games):
            a, b = g.player_a, g.player_b
            a_throw = actions.get((idx, a)) == Action.THROW
            b_throw = actions.get((idx, b)) == Action.THROW
            if a_throw and b_throw:
                admissible = False
                break
            if a_throw:
                options.append([(b, ONE)])
            elif b_throw:
                options.append([(a, ONE)])
            else:
                p = matrix.p(a, b)
                opts = []
                if p != 0:
                    opts.append((a, p))
                if p != 1:
                    opts.append((b, ONE - p))
                options.append(opts)
        if not admissible:
            continue
        total = ZERO
        for outcome in itertools.product(*options):
            prob = ONE
            for _, q in outcome:
                prob *= q
            winners = {i: w for i, (w, _) in enumerate(outcome)}
            total += prob * _round_value(
                advance_round(tree, winners), matrix, coalition, favorite, pinned, memo
            )
        if collect_profiles is not None:
            profile_players = sorted({p for _, p, _ in free_slots})
            per_player = {p: a for (_, p, _), a in zip(free_slots, chosen)}
            profile = StrategyProfile(
                tuple((p, per_player[p]) for p in profile_players)
            )
            collect_profiles.append((profile, total))
        if best is None or total > best:
            best = total
    assert best is not None, "every game admits at least one admissible profile"
    if collect_profiles is None:
        memo[key] = best
    return best


def _check_limits(inst: Instance, size_limit: int) -> None:
    report = validate_instance(inst)
    if report:
        raise ValidationError(report)
    if inst.n > size_limit:
        raise SizeLimitExceeded(
            f"instance has {inst.n} players, exhaustive limit is {size_limit}"
        )


def oracle_adaptive(inst: Instance, size_limit: int = DEFAULT_SIZE_LIMIT) -> Fraction:
    """Exact adaptive optimum by exhaustive recursion over residual trees."""
    _check_limits(inst, size_limit)
    return _round_value(
        inst.tree, inst.matrix, frozenset(inst.coalition), inst.favorite, None, {}
    )


def oracle_best_profiles(
    inst: Instance, size_limit: int = DEFAULT_SIZE_LIMIT
) -> set[StrategyProfile]:
    """All round-one profiles whose continuation value attains the optimum."""
    _check_limits(inst, size_limit)
    collected: list[tuple[StrategyProfile, Fraction]] = []
    memo: dict = {}
    best = _round_value(
        inst.tree,
        inst.matrix,
        frozenset(inst.coalition),
        inst.favorite,
        None,
        memo,
        collect_profiles=collected,
    )
    return {profile for profile, value in collected if value == best}


def feasible_pairs(inst: Instance) -> list[tuple[int, int]]:
    """(coalition player, opponent) pairs that can ever meet in the tree.

    Players meet at their lowest common ancestor; each must be able to win
    its side with a path of games of nonzero effective probability (a
    coalition opponent can always throw).  Pairs outside this set never
    have their decision consulted.
    """
    coalition = inst.coalition
    matrix = inst.matrix

    def possible_winners(tree: TournamentTree) -> tuple[set[int], list[tuple[int, int]]]:
        if isinstance(tree, Leaf):
            return {tree.player}, []
        left, pairs_l = possible_winners(tree.left)
        right, pairs_r = possible_winners(tree.right)
        pairs = pairs_l + pairs_r
        for x in sorted(left):
            for y in sorted(right):
                if x in coalition:
                    pairs.append((x, y))
                if y in coalition:
                    pairs.append((y, x))
        winners = set()
        for x in left:
            if any(matrix.p(x, y) > 0 or y in coalition for y in right):
                winners.add(x)
        for y in right:
            if any(matrix.p(y, x) > 0 or x in coalition for x in left):
                winners.add(y)
        return winners, pairs

    _, pairs = possible_winners(inst.tree)
    return sorted(set(pairs))


def oracle_nonadaptive(
    inst: Instance,
    size_limit: int = DEFAULT_SIZE_LIMIT,
    pair_limit: int = DEFAULT_PAIR_LIMIT,
) -> Fraction:
    """Exact optimum over non-adaptive strategies.

    Branch and bound over the feasible decision pairs: pinning a pair fixes
    it for the whole tournament, the adaptive relaxation of the free pairs
    is an upper bound, and a fully pinned evaluation is plain outcome-tree
    summation.  Equivalent to enumerating every admissible strategy table.
    """
    _check_limits(inst, size_limit)
    if len(inst.coalition) * (inst.n - 1) > pair_limit:
        raise SizeLimitExceeded(
            f"{len(inst.coalition)} coalition players x {inst.n - 1} opponents "
            f"exceeds the pair limit {pair_limit}"
        )
    coalition = frozenset(inst.coalition)
    pairs = feasible_pairs(inst)

    def bound(pinned: dict[tuple[int, int], Action]) -> Fraction:
        return _round_value(
            inst.tree, inst.matrix, coalition, inst.favorite, pinned, {}
        )

    def admissible(pinned: dict[tuple[int, int], Action], pair, act) -> bool:
        c, o = pair
        if act == Action.THROW and o in coalition:
            return pinned.get((o, c)) != Action.THROW
        return True

    # incumbent: the all-play table
    all_play = {p: Action.PLAY for p in pairs}
    incumbent = bound(all_play)

    def search(idx: int, pinned: dict[tuple[int, int], Action]) -> None:
        nonlocal incumbent
        children = []
        for act in (Action.PLAY, Action.THROW):
            if not admissible(pinned, pairs[idx], act):
                continue
            child = dict(pinned)
            child[pairs[idx]] = act
            children.append((bound(child), 0 if act == Action.PLAY else 1, child))
        children.sort(key=lambda t: (-t[0], t[1]))
        for b, _, child in children:
            if b <= incumbent:
                continue
            if idx + 1 == len(pairs):
                incumbent = b  # fully pinned: the bound is the exact value
            else:
                search(idx + 1, child)

    if pairs:
        search(0, {})
    return incumbent
