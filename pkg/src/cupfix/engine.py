"""Round semantics for generalized knockout trees.

Each round, the leaves at maximum depth pair up with their siblings and
play; winners replace the parent node.  A game at an internal node of
depth d therefore resolves in round ``height - d``, and repeated
``advance_round`` calls shrink the tree until one leaf remains.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .model import (
    Fraction,
    Inner,
    Instance,
    Leaf,
    ProbabilityMatrix,
    TournamentTree,
    tree_height,
)


class UnknownWinner(ValueError):
    """A declared winner is not a participant of its game."""


class IncompleteRound(ValueError):
    """The winner map does not cover every current game."""


@dataclass(frozen=True)
class Game:
    """A playable pairing: two sibling leaves at the current maximum depth."""

    parent: Inner
    player_a: int
    player_b: int


@dataclass(frozen=True)
class RoundState:
    """Residual tree plus bookkeeping for an in-progress tournament."""

    tree: TournamentTree
    round_number: int
    eliminated: frozenset[int]

    @property
    def finished(self) -> bool:
        return isinstance(self.tree, Leaf)

    @property
    def winner(self) -> int | None:
        return self.tree.player if isinstance(self.tree, Leaf) else None


def initial_state(tree: TournamentTree) -> RoundState:
    return RoundState(tree=tree, round_number=1, eliminated=frozenset())


def current_pairings(tree: TournamentTree) -> list[Game]:
    """Sibling leaf pairs at maximum depth, left to right.

    In any binary tree the sibling of a maximum-depth leaf is itself a
    maximum-depth leaf, so these pairs are exactly the games of the
    current round.  A single leaf has no games.
    """
    max_depth = tree_height(tree)
    if max_depth == 0:
        return []
    games: list[Game] = []

    def walk(node: TournamentTree, depth: int) -> None:
        if isinstance(node, Leaf):
            return
        if (
            depth == max_depth - 1
            and isinstance(node.left, Leaf)
            and isinstance(node.right, Leaf)
        ):
            games.append(Game(node, node.left.player, node.right.player))
            return
        walk(node.left, depth + 1)
        walk(node.right, depth + 1)

    walk(tree, 0)
    return games


def advance_round(tree: TournamentTree, winners: Mapping[int, int]) -> TournamentTree:
    """Resolve the current round; ``winners`` maps game index -> winning player.

    Game indices follow ``current_pairings`` order.  Every current game must
    have a declared winner (``IncompleteRound``) naming one of its two
    participants (``UnknownWinner``).
    """
    games = current_pairings(tree)
    if not games:
        return tree
    for idx, game in enumerate(games):
        if idx not in winners:
            raise IncompleteRound(f"game {idx} has no declared winner")
        w = winners[idx]
        if w not in (game.player_a, game.player_b):
            raise UnknownWinner(
                f"winner {w} of game {idx} is not one of "
                f"({game.player_a}, {game.player_b})"
            )
    resolved = {id(g.parent): winners[i] for i, g in enumerate(games)}

    def rebuild(node: TournamentTree) -> TournamentTree:
        if isinstance(node, Leaf):
            return node
        if id(node) in resolved:
            return Leaf(resolved[id(node)])
        return Inner(rebuild(node.left), rebuild(node.right))

    return rebuild(tree)


def advance_state(state: RoundState, winners: Mapping[int, int]) -> RoundState:
    games = current_pairings(state.tree)
    new_tree = advance_round(state.tree, winners)
    losers = {
        g.player_a if winners[i] == g.player_b else g.player_b
        for i, g in enumerate(games)
    }
    return RoundState(
        tree=new_tree,
        round_number=state.round_number + 1,
        eliminated=state.eliminated | losers,
    )


def reach_distribution(
    tree: TournamentTree, matrix: ProbabilityMatrix
) -> dict[int, Fraction]:
    """Exact win distribution of a subtree under honest play.

    The caller guarantees no contained player has an undecided strategy
    (sibling subtrees never hold coalition players).  Only players with a
    nonzero probability appear in the result; values sum to exactly 1.

    Opponent sides are aggregated per interchangeability class of the
    matrix, which keeps the bilinear combination step linear in practice
    for generated instances with large uniform player groups.
    """
    classes = matrix.interchange_classes()
    cls_of = [0] * matrix.n
    for ci, members in enumerate(classes):
        for m in members:
            cls_of[m] = ci

    def combine(
        da: dict[int, Fraction], db: dict[int, Fraction]
    ) -> dict[int, Fraction]:
        # class id -> (total mass, witness player) for each side
        def masses(d: dict[int, Fraction]) -> dict[int, tuple[Fraction, int]]:
            out: dict[int, tuple[Fraction, int]] = {}
            for player, mass in d.items():
                ci = cls_of[player]
                if ci in out:
                    out[ci] = (out[ci][0] + mass, out[ci][1])
                else:
                    out[ci] = (mass, player)
            return out

        ma, mb = masses(da), masses(db)
        result: dict[int, Fraction] = {}
        for x, px in da.items():
            beat = sum(
                (mass * matrix.p(x, witness) for mass, witness in mb.values()),
                Fraction(0),
            )
            if px * beat:
                result[x] = px * beat
        for y, py in db.items():
            beat = sum(
                (mass * matrix.p(y, witness) for mass, witness in ma.values()),
                Fraction(0),
            )
            if py * beat:
                result[y] = py * beat
        return result

    # Iterative post-order so deep generated trees do not hit recursion limits.
    dist: dict[int, dict[int, Fraction]] = {}
    stack: list[tuple[TournamentTree, bool]] = [(tree, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Leaf):
            dist[id(node)] = {node.player: Fraction(1)}
        elif not expanded:
            stack.append((node, True))
            stack.append((node.right, False))
            stack.append((node.left, False))
        else:
            left = dist.pop(id(node.left))
            right = dist.pop(id(node.right))
            dist[id(node)] = combine(left, right)
    return dist[id(tree)]


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    wins: int
    trials: int


def monte_carlo_win_estimate(
    inst: Instance, trials: int, seed: int
) -> MonteCarloEstimate:
    """Simulate the tournament under the round-by-round best-response policy.

    Each round the coalition plays the best response for the residual
    tournament (solved exactly and cached per residual tree); outcomes are
    then sampled.  Rationals cross to floats only at the sampling boundary,
    so the policy itself is the exact optimal one.  Deterministic per seed.
    """
    from .solver import Action, best_response_for

    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    matrix = inst.matrix
    coalition = inst.coalition

    policy_cache: dict[tuple, dict[int, Action]] = {}

    def tree_key(tree: TournamentTree) -> tuple:
        # leaf order plus leaf depths pin down a binary tree exactly
        leaves, depths = [], []
        stack = [(tree, 0)]
        while stack:
            node, d = stack.pop()
            if isinstance(node, Leaf):
                leaves.append(node.player)
                depths.append(d)
            else:
                stack.append((node.right, d + 1))
                stack.append((node.left, d + 1))
        return tuple(leaves), tuple(depths)

    def profile_for(tree: TournamentTree) -> dict[int, Action]:
        key = tree_key(tree)
        if key not in policy_cache:
            response = best_response_for(tree, matrix, coalition, inst.favorite)
            policy_cache[key] = dict(response.profile.actions)
        return policy_cache[key]

    wins = 0
    for _ in range(trials):
        tree = inst.tree
        while not isinstance(tree, Leaf):
            profile = profile_for(tree)
            winners: dict[int, int] = {}
            for idx, game in enumerate(current_pairings(tree)):
                a, b = game.player_a, game.player_b
                a_throws = profile.get(a) == Action.THROW
                b_throws = profile.get(b) == Action.THROW
                if a_throws:
                    winners[idx] = b
                elif b_throws:
                    winners[idx] = a
                else:
                    p_a = matrix.p(a, b)
                    winners[idx] = a if rng.random() < float(p_a) else b
            tree = advance_round(tree, winners)
        if tree.player == inst.favorite:
            wins += 1

    estimate = wins / trials
    std_error = (estimate * (1.0 - estimate) / trials) ** 0.5
    return MonteCarloEstimate(estimate, std_error, wins, trials)
