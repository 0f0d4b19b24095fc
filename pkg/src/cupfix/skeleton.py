"""Coalition skeleton: the state scaffold of the configuration DP.

The skeleton is the union of root-to-leaf paths for coalition leaves.
Level ``i`` holds its vertices at depth ``i``; a configuration assigns a
player (drawn from the vertex's subtree) to every level vertex, and a
sibling configuration assigns non-coalition players to the level's
non-skeleton sibling vertices.  Occupants of level ``i`` play their games
in round ``height - i + 1``, so the transition from level ``i`` to
``i - 1`` describes exactly one tournament round as seen by the coalition.

Vertices are integer ids into a :class:`TreeArena`, a flat indexed view of
the tournament tree (preorder, so vertex order is left-to-right).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .engine import reach_distribution
from .model import Leaf, ProbabilityMatrix, TournamentTree


class LevelMismatch(ValueError):
    """Configurations passed to a transition are not on adjacent levels."""


class DoubleThrow(ValueError):
    """Both participants of one game are set to throw."""


class Action(enum.Enum):
    PLAY = "PLAY"
    THROW = "THROW"


class TreeArena:
    """Flat preorder index of a tournament tree.

    Gives O(1) parent/child/depth navigation and stable vertex ids; all
    skeleton machinery works on these ids instead of node objects.
    """

    def __init__(self, tree: TournamentTree):
        self.tree = tree
        self.node: list[TournamentTree] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.parent: list[int] = []
        self.depth: list[int] = []
        self.leaf_player: list[int] = []  # -1 for internal vertices

        stack: list[tuple[TournamentTree, int, int]] = [(tree, -1, 0)]
        while stack:
            node, par, d = stack.pop()
            vid = len(self.node)
            self.node.append(node)
            self.parent.append(par)
            self.depth.append(d)
            if par >= 0:
                if self.left[par] == -1:
                    self.left[par] = vid
                else:
                    self.right[par] = vid
            if isinstance(node, Leaf):
                self.left.append(-1)
                self.right.append(-1)
                self.leaf_player.append(node.player)
            else:
                self.left.append(-1)
                self.right.append(-1)
                self.leaf_player.append(-1)
                # push right first so the left child gets the smaller id
                stack.append((node.right, vid, d + 1))
                stack.append((node.left, vid, d + 1))

        self.vertex_of_player = {
            p: v for v, p in enumerate(self.leaf_player) if p >= 0
        }
        self.height = max(self.depth[v] for v in range(len(self.node)) if self.leaf_player[v] >= 0)

    @property
    def size(self) -> int:
        return len(self.node)

    def is_leaf(self, v: int) -> bool:
        return self.leaf_player[v] >= 0

    def sibling(self, v: int) -> int:
        par = self.parent[v]
        if par < 0:
            return -1
        return self.right[par] if self.left[par] == v else self.left[par]

    def subtree_players(self, v: int) -> list[int]:
        """Leaf players under ``v`` (inclusive), in left-to-right order."""
        out: list[int] = []
        stack = [v]
        while stack:
            u = stack.pop()
            if self.leaf_player[u] >= 0:
                out.append(self.leaf_player[u])
            else:
                stack.append(self.right[u])
                stack.append(self.left[u])
        return out


@dataclass(frozen=True)
class Skeleton:
    """Union of root-to-coalition-leaf paths with its level decomposition."""

    arena: TreeArena
    coalition: frozenset[int]
    vertices: frozenset[int]
    levels: tuple[tuple[int, ...], ...]  # L_0 .. L_D, vertex ids ascending

    @property
    def max_level(self) -> int:
        return len(self.levels) - 1

    @property
    def empty(self) -> bool:
        return not self.vertices


def build_skeleton(tree: TournamentTree, coalition: Iterable[int]) -> Skeleton:
    arena = TreeArena(tree)
    return build_skeleton_on(arena, coalition)


def build_skeleton_on(arena: TreeArena, coalition: Iterable[int]) -> Skeleton:
    coalition = frozenset(coalition)
    present = [c for c in coalition if c in arena.vertex_of_player]
    vertices: set[int] = set()
    for player in present:
        v = arena.vertex_of_player[player]
        while v >= 0 and v not in vertices:
            vertices.add(v)
            v = arena.parent[v]
    if not vertices:
        return Skeleton(arena, coalition, frozenset(), ())
    max_depth = max(arena.depth[v] for v in vertices)
    levels: list[list[int]] = [[] for _ in range(max_depth + 1)]
    for v in sorted(vertices):
        levels[arena.depth[v]].append(v)
    return Skeleton(arena, coalition, frozenset(vertices), tuple(tuple(l) for l in levels))


@dataclass(frozen=True)
class Configuration:
    """Players occupying the skeleton vertices of one level."""

    level: int
    assignment: tuple[tuple[int, int], ...]  # (vertex, player), vertex ascending

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.assignment)

    @property
    def players(self) -> tuple[int, ...]:
        return tuple(p for _, p in self.assignment)


@dataclass(frozen=True)
class SiblingConfiguration:
    """Players occupying the non-skeleton siblings of one level's vertices."""

    level: int
    assignment: tuple[tuple[int, int], ...]

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.assignment)


@dataclass(frozen=True)
class StrategyProfile:
    """Play/throw vector for the coalition players of one round."""

    actions: tuple[tuple[int, Action], ...]  # (player, action), player ascending

    @property
    def mapping(self) -> dict[int, Action]:
        return dict(self.actions)

    def throws(self, player: int) -> bool:
        return dict(self.actions).get(player) == Action.THROW


EMPTY_PROFILE = StrategyProfile(())


def sibling_vertices(sk: Skeleton, level: int) -> list[int]:
    """Non-skeleton siblings of the level's vertices, ascending."""
    out = []
    for v in sk.levels[level]:
        s = sk.arena.sibling(v)
        if s >= 0 and s not in sk.vertices:
            out.append(s)
    return sorted(out)


def valid_configurations(sk: Skeleton, level: int) -> list[Configuration]:
    """All assignments of subtree players to the level's vertices.

    Distinctness is automatic: same-level vertices root disjoint subtrees.
    Enumeration order is lexicographic by vertex then player id.
    """
    verts = sk.levels[level]
    choices = [sorted(sk.arena.subtree_players(v)) for v in verts]
    configs = []
    for combo in itertools.product(*choices):
        configs.append(Configuration(level, tuple(zip(verts, combo))))
    return configs


def sibling_configurations(
    sk: Skeleton, matrix: ProbabilityMatrix, level: int
) -> list[tuple[SiblingConfiguration, Fraction]]:
    """Reachable sibling configurations with their exact probabilities.

    Sibling subtrees of one level are disjoint, so the probability of a
    joint configuration is the product of the occupants' honest win
    probabilities.  Only configurations with a nonzero probability are
    produced, and the probabilities sum to exactly 1.
    """
    verts = sibling_vertices(sk, level)
    supports: list[list[tuple[int, Fraction]]] = []
    for v in verts:
        dist = reach_distribution(sk.arena.node[v], matrix)
        supports.append(sorted(dist.items()))
    out = []
    for combo in itertools.product(*supports):
        prob = Fraction(1)
        for _, q in combo:
            prob *= q
        assignment = tuple((v, p) for v, (p, _) in zip(verts, combo))
        out.append((SiblingConfiguration(level, assignment), prob))
    return out


def effective_probability(
    a: int, b: int, profile: StrategyProfile, matrix: ProbabilityMatrix
) -> Fraction:
    """Probability that ``a`` beats ``b`` under the round's profile.

    A thrower's winning probability is zero; its opponent advances with
    probability one.  Both participants throwing is forbidden.
    """
    a_throws = profile.throws(a)
    b_throws = profile.throws(b)
    if a_throws and b_throws:
        raise DoubleThrow(f"both {a} and {b} throw")
    if a_throws:
        return Fraction(0)
    if b_throws:
        return Fraction(1)
    return matrix.p(a, b)


def _sibling_pairs(sk: Skeleton, config: Configuration) -> list[tuple[int, int]]:
    """Pairs of configuration players whose vertices are siblings."""
    occupant = config.mapping
    pairs = []
    for v, player in config.assignment:
        s = sk.arena.sibling(v)
        if s in occupant and s > v:
            pairs.append((player, occupant[s]))
    return pairs


def strategy_profiles(
    sk: Skeleton, config: Configuration, sibling: SiblingConfiguration
) -> list[StrategyProfile]:
    """All admissible play/throw vectors for the configuration's coalition players.

    Two coalition players paired as siblings may not both throw.  With no
    coalition player present the single empty profile is returned.
    """
    if config.level != sibling.level:
        raise LevelMismatch("configuration and sibling configuration levels differ")
    members = sorted(p for p in config.players if p in sk.coalition)
    coalition_pairs = [
        (a, b) for a, b in _sibling_pairs(sk, config)
        if a in sk.coalition and b in sk.coalition
    ]
    profiles = []
    for actions in itertools.product((Action.PLAY, Action.THROW), repeat=len(members)):
        chosen = dict(zip(members, actions))
        if any(
            chosen[a] == Action.THROW and chosen[b] == Action.THROW
            for a, b in coalition_pairs
        ):
            continue
        profiles.append(StrategyProfile(tuple(zip(members, actions))))
    return profiles


def transition_probability(
    sk: Skeleton,
    matrix: ProbabilityMatrix,
    config: Configuration,
    sibling: SiblingConfiguration,
    target: Configuration,
    profile: StrategyProfile,
) -> Fraction:
    """Probability that ``target`` is obtained from ``config`` in one round.

    Product over the parent level's vertices of the effective probability
    of the target occupant winning its child game; a coalition leaf first
    appearing on the parent level contributes factor one when assigned its
    own player and zero otherwise.
    """
    i = config.level
    if sibling.level != i or target.level != i - 1 or i < 1:
        raise LevelMismatch(
            f"expected levels (i, i, i-1), got ({config.level}, {sibling.level}, {target.level})"
        )
    occupant = config.mapping | sibling.mapping
    arena = sk.arena
    prob = Fraction(1)
    for u, winner in target.assignment:
        if arena.is_leaf(u):
            # a coalition player joining the frontier at its own depth
            if winner != arena.leaf_player[u]:
                return Fraction(0)
            continue
        a, b = arena.left[u], arena.right[u]
        occ_a, occ_b = occupant[a], occupant[b]
        if winner == occ_a:
            prob *= effective_probability(occ_a, occ_b, profile, matrix)
        elif winner == occ_b:
            prob *= effective_probability(occ_b, occ_a, profile, matrix)
        else:
            return Fraction(0)
        if prob == 0:
            return prob
    return prob
