"""Configuration dynamic program: optimal coalition value and best responses.

The recursion runs over skeleton levels, bottom of the tree towards the
root; occupants of level ``i`` play their games in round ``height - i + 1``.
A state holds the configuration (players on the skeleton's level vertices)
together with the current frontier of every pending sibling subtree: those
subtrees resolve honestly, one depth per round, and their partially
resolved insides are part of what the coalition observes when it picks a
round's strategy profile.  Conditioning on them is required for exactness:
a round decision may profit from an early result deep inside a subtree the
coalition only meets later.  The expectation over a sibling subtree's
winner therefore accumulates across rounds instead of being marginalised
in one step.

Internally players are quotiented by the probability-interchange classes
exposed by the matrix: swapping two interchangeable players changes no
value, so one class-level state stands for all member-level states.
Parsed (dense) instances have trivial classes; generated instances
collapse their large uniform dummy pools, which is what keeps
reduction-sized tournaments solvable.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .engine import reach_distribution
from .model import (
    Instance,
    ProbabilityMatrix,
    TournamentTree,
    ValidationError,
    validate_instance,
)
from .skeleton import (
    Action,
    EMPTY_PROFILE,
    StrategyProfile,
    TreeArena,
    build_skeleton_on,
)

ZERO = Fraction(0)
ONE = Fraction(1)


class Mode(enum.Enum):
    FULL = "full"
    REACHABLE = "reachable"
    LOW_MEMORY = "lowmem"


@dataclass
class TableStats:
    entries_computed: int = 0
    configurations_enumerated: int = 0
    peak_table_entries: int = 0


@dataclass(frozen=True)
class OptResult:
    t_opt: Fraction
    mode: Mode
    stats: TableStats


@dataclass(frozen=True)
class BestResponse:
    """First-round profile achieving the optimal value."""

    profile: StrategyProfile
    value: Fraction


# transition position kinds
_JOIN = 0
_GAME = 1
_SRC_CONFIG = 0
_SRC_COMPONENT = 1

# component step kinds
_CARRY = 0
_PLAY = 1


class _Component:
    """One sibling subtree: an honest, independently resolving process.

    ``positions[d]`` lists its residual leaf vertices when the whole tree
    is truncated at depth ``d``; ``steps[d]`` rebuilds ``positions[d]``
    from ``positions[d + 1]`` (carry a surviving leaf or play the game at
    a depth-``d`` vertex).  States are class tuples over the positions,
    interned to small ids per depth.
    """

    def __init__(self, dp: "_DP", root: int):
        arena = dp.arena
        self.root = root
        self.level = arena.depth[root]
        leaves = []
        maxd = self.level
        stack = [root]
        while stack:
            v = stack.pop()
            if arena.is_leaf(v):
                leaves.append(v)
                maxd = max(maxd, arena.depth[v])
            else:
                stack.append(arena.right[v])
                stack.append(arena.left[v])
        self.max_depth = maxd

        # positions are only needed to derive the per-depth advance steps
        self.steps: dict[int, tuple[tuple, ...]] = {}
        prev = self._frontier(arena, self.max_depth)
        for d in range(self.max_depth - 1, self.level - 1, -1):
            steps: list[tuple] = []
            new_pos: list[int] = []
            idx = 0
            while idx < len(prev):
                v = prev[idx]
                if arena.depth[v] == d + 1:
                    sib = prev[idx + 1]
                    assert arena.parent[v] == arena.parent[sib], "siblings pair up"
                    steps.append((_PLAY, idx, idx + 1))
                    new_pos.append(arena.parent[v])
                    idx += 2
                else:
                    steps.append((_CARRY, idx))
                    new_pos.append(v)
                    idx += 1
            prev = tuple(new_pos)
            self.steps[d] = tuple(steps)

        # interned states per depth: state tuple -> small id
        self._state_ids: dict[int, dict[tuple[int, ...], int]] = {}
        self._states: dict[int, list[tuple[int, ...]]] = {}
        start = tuple(dp.cls_of[arena.leaf_player[v]] for v in leaves)
        self._intern(self.max_depth, start)
        self.initial_id = 0
        # advance kernels cache: (depth, state id) -> tuple[(next id, prob)]
        self._kernel: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]] = {}
        self._dp = dp

    def _frontier(self, arena: TreeArena, d: int) -> tuple[int, ...]:
        out: list[int] = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            if arena.is_leaf(v) or arena.depth[v] == d:
                out.append(v)
            else:
                stack.append(arena.right[v])
                stack.append(arena.left[v])
        return tuple(out)

    def _intern(self, depth: int, state: tuple[int, ...]) -> int:
        ids = self._state_ids.setdefault(depth, {})
        if state not in ids:
            ids[state] = len(ids)
            self._states.setdefault(depth, []).append(state)
        return ids[state]

    def clamp(self, level: int) -> int:
        return min(max(level, self.level), self.max_depth)

    def state(self, level: int, state_id: int) -> tuple[int, ...]:
        return self._states[self.clamp(level)][state_id]

    def occupant(self, state_id: int) -> int:
        """Root occupant class once the component reached its own level."""
        state = self._states[self.level][state_id]
        assert len(state) == 1
        return state[0]

    def advance(self, level: int, state_id: int) -> tuple[tuple[int, Fraction], ...]:
        """Distribution over states one depth shallower (honest play)."""
        d = level - 1
        if d >= self.max_depth:
            return ((state_id, ONE),)
        key = (d, state_id)
        if key in self._kernel:
            return self._kernel[key]
        dp = self._dp
        state = self._states[d + 1][state_id]
        options: list[list[tuple[int, Fraction]]] = []
        for step in self.steps[d]:
            if step[0] == _CARRY:
                options.append([(state[step[1]], ONE)])
            else:
                options.append(dp.game_options(state[step[1]], state[step[2]], frozenset()))
        out: dict[int, Fraction] = {}
        for combo in itertools.product(*options):
            prob = ONE
            for _, q in combo:
                prob *= q
            nid = self._intern(d, tuple(c for c, _ in combo))
            out[nid] = out.get(nid, ZERO) + prob
        result = tuple(sorted(out.items()))
        self._kernel[key] = result
        return result


def leaves_in_order(arena: TreeArena, root: int) -> list[int]:
    out: list[int] = []
    stack = [root]
    while stack:
        v = stack.pop()
        if arena.is_leaf(v):
            out.append(v)
        else:
            stack.append(arena.right[v])
            stack.append(arena.left[v])
    return out


class _DP:
    """Shared machinery behind all solve modes."""

    def __init__(
        self,
        tree: TournamentTree,
        matrix: ProbabilityMatrix,
        coalition: Iterable[int],
        favorite: int,
    ):
        self.matrix = matrix
        self.favorite = favorite
        self.arena = TreeArena(tree)
        self.coalition = frozenset(
            c for c in coalition if c in self.arena.vertex_of_player
        )
        self.stats = TableStats()

        # interchange classes; favorite and coalition players stay singletons
        special = set(self.coalition) | {favorite}
        classes: list[tuple[int, ...]] = []
        for members in matrix.interchange_classes():
            rest = tuple(m for m in members if m not in special)
            classes.extend((m,) for m in members if m in special)
            if rest:
                classes.append(rest)
        classes.sort(key=lambda c: c[0])
        self.classes = classes
        self.cls_of: dict[int, int] = {}
        self.rep: list[int] = []
        for ci, members in enumerate(classes):
            self.rep.append(members[0])
            for m in members:
                self.cls_of[m] = ci
        self.fav_cls = self.cls_of.get(favorite, -1)
        self.coalition_cls = frozenset(self.cls_of[c] for c in self.coalition)

        self.sk = build_skeleton_on(self.arena, self.coalition)
        self.height = self.arena.height
        if not self.sk.empty:
            self.components = self._build_components()
            self._candidate_cache: dict[int, tuple[int, ...]] = {}
            self._level_cache: dict[int, tuple] = {}
            self._profile_cache: dict[tuple, list[frozenset[int]]] = {}

    def _build_components(self) -> list[_Component]:
        sk, arena = self.sk, self.arena
        roots = []
        for level in range(1, sk.max_level + 1):
            for v in sk.levels[level]:
                s = arena.sibling(v)
                if s >= 0 and s not in sk.vertices:
                    roots.append(s)
        return [_Component(self, r) for r in sorted(roots)]

    # -- class-level probability helpers ------------------------------------

    def class_p(self, ca: int, cb: int) -> Fraction:
        return self.matrix.p(self.rep[ca], self.rep[cb])

    def game_options(
        self, x: int, y: int, throws: frozenset[int]
    ) -> list[tuple[int, Fraction]]:
        if x == y:
            return [(x, ONE)]
        if x in throws:
            return [(y, ONE)]
        if y in throws:
            return [(x, ONE)]
        p = self.class_p(x, y)
        opts = []
        if p != 0:
            opts.append((x, p))
        if p != 1:
            opts.append((y, ONE - p))
        return opts

    def candidates(self, v: int) -> tuple[int, ...]:
        """Classes with at least one member leaf under vertex ``v``."""
        if v not in self._candidate_cache:
            cls = {self.cls_of[p] for p in self.arena.subtree_players(v)}
            self._candidate_cache[v] = tuple(sorted(cls))
        return self._candidate_cache[v]

    # -- level structure -----------------------------------------------------

    def svert(self, i: int) -> tuple[int, ...]:
        if i <= self.sk.max_level:
            return self.sk.levels[i]
        return ()

    def alive(self, i: int) -> list[int]:
        """Indices of components whose frontier is still pending at level i."""
        return [ci for ci, c in enumerate(self.components) if c.level <= i]

    def level_structure(self, i: int):
        """Transition description for level ``i`` -> ``i - 1``.

        Returns (positions, sibling config-index pairs, component split)
        where positions describe each ``L_{i-1}`` vertex as a join or a
        game whose participants come from the level-``i`` configuration or
        from a component consumed this round.
        """
        if i in self._level_cache:
            return self._level_cache[i]
        arena = self.arena
        prev = self.svert(i)
        s_index = {v: idx for idx, v in enumerate(prev)}
        alive = self.alive(i)
        comp_pos = {self.components[ci].root: k for k, ci in enumerate(alive)}
        consumed = [
            k for k, ci in enumerate(alive) if self.components[ci].level == i
        ]
        surviving = [
            k for k, ci in enumerate(alive) if self.components[ci].level < i
        ]
        positions = []
        for u in self.svert(i - 1):
            if arena.is_leaf(u):
                positions.append((_JOIN, self.cls_of[arena.leaf_player[u]], None))
            else:
                srcs = []
                for child in (arena.left[u], arena.right[u]):
                    if child in s_index:
                        srcs.append((_SRC_CONFIG, s_index[child]))
                    else:
                        srcs.append((_SRC_COMPONENT, comp_pos[child]))
                positions.append((_GAME, srcs[0], srcs[1]))
        pair_idx = []
        for idx, v in enumerate(prev):
            s = arena.sibling(v)
            if s in s_index and s > v:
                pair_idx.append((idx, s_index[s]))
        struct = (positions, tuple(pair_idx), tuple(alive), tuple(consumed), tuple(surviving))
        self._level_cache[i] = struct
        return struct

    def profiles(self, i: int, cfg: tuple[int, ...]) -> list[frozenset[int]]:
        """Admissible throw sets for the level's coalition occupants.

        Enumeration order is all-play first, then lexicographic by player
        id with PLAY before THROW.
        """
        key = (i, cfg)
        if key in self._profile_cache:
            return self._profile_cache[key]
        _, pair_idx, _, _, _ = self.level_structure(i)
        members = sorted(
            (self.rep[c], c) for c in set(cfg) if c in self.coalition_cls
        )
        member_cls = [c for _, c in members]
        forbidden = [
            (cfg[a], cfg[b])
            for a, b in pair_idx
            if cfg[a] in self.coalition_cls and cfg[b] in self.coalition_cls
        ]
        out = []
        for actions in itertools.product((False, True), repeat=len(member_cls)):
            throws = frozenset(c for c, t in zip(member_cls, actions) if t)
            if any(a in throws and b in throws for a, b in forbidden):
                continue
            out.append(throws)
        self._profile_cache[key] = out
        return out

    # -- states ---------------------------------------------------------------

    def initial_state(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        r = self.height
        cfg = tuple(
            self.cls_of[self.arena.leaf_player[v]] for v in self.svert(r)
        )
        comps = tuple(0 for _ in self.alive(r))
        return cfg, comps

    def base_value(self, cfg: tuple[int, ...]) -> Fraction:
        return ONE if cfg == (self.fav_cls,) else ZERO

    def transition(
        self,
        i: int,
        cfg: tuple[int, ...],
        comps: tuple[int, ...],
        throws: frozenset[int],
    ) -> Iterable[tuple[tuple[int, ...], tuple[int, ...], Fraction]]:
        """Joint outcomes of one round: next (config, components, probability)."""
        positions, _, alive, consumed, surviving = self.level_structure(i)
        occupant_of = {
            k: self.components[alive[k]].occupant(comps[k]) for k in consumed
        }
        options: list[list[tuple[int, Fraction]]] = []
        for kind, a, b in positions:
            if kind == _JOIN:
                options.append([(a, ONE)])
            else:
                x = cfg[a[1]] if a[0] == _SRC_CONFIG else occupant_of[a[1]]
                y = cfg[b[1]] if b[0] == _SRC_CONFIG else occupant_of[b[1]]
                options.append(self.game_options(x, y, throws))
        n_pos = len(options)
        for k in surviving:
            options.append(
                [
                    (nid, q)
                    for nid, q in self.components[alive[k]].advance(i, comps[k])
                ]
            )
        for combo in itertools.product(*options):
            prob = ONE
            for _, q in combo:
                prob *= q
            new_cfg = tuple(c for c, _ in combo[:n_pos])
            new_comps = tuple(c for c, _ in combo[n_pos:])
            yield new_cfg, new_comps, prob

    # -- evaluation -----------------------------------------------------------

    def level_value(self, i, cfg, comps, lookup) -> Fraction:
        best: Optional[Fraction] = None
        for throws in self.profiles(i, cfg):
            total = ZERO
            for new_cfg, new_comps, prob in self.transition(i, cfg, comps, throws):
                total += prob * lookup(new_cfg, new_comps)
            if best is None or total > best:
                best = total
        return best

    def solve_reachable(self) -> Fraction:
        memo: dict[tuple, Fraction] = {}

        def value(i: int, cfg, comps) -> Fraction:
            if i == 0:
                return self.base_value(cfg)
            key = (i, cfg, comps)
            if key in memo:
                return memo[key]
            self.stats.configurations_enumerated += 1
            result = self.level_value(
                i, cfg, comps, lambda c, f: value(i - 1, c, f)
            )
            memo[key] = result
            self.stats.entries_computed += 1
            self.stats.peak_table_entries = max(
                self.stats.peak_table_entries, len(memo)
            )
            return result

        cfg, comps = self.initial_state()
        return value(self.height, cfg, comps)

    def component_states(self, i: int) -> list[list[int]]:
        """Reachable state ids per alive component at level ``i``."""
        out = []
        for ci in self.alive(i):
            comp = self.components[ci]
            states = {0}
            for d in range(comp.max_depth, comp.clamp(i), -1):
                states = {
                    nid for sid in states for nid, _ in comp.advance(d, sid)
                }
            out.append(sorted(states))
        return out

    def solve_full(self) -> Fraction:
        table: dict[tuple, Fraction] = {}
        for cls in self.candidates(self.svert(0)[0]):
            table[(0, (cls,), ())] = self.base_value((cls,))
            self.stats.entries_computed += 1
            self.stats.configurations_enumerated += 1
        for i in range(1, self.height + 1):
            cfg_lists = [self.candidates(v) for v in self.svert(i)]
            comp_lists = self.component_states(i)
            for cfg in itertools.product(*cfg_lists):
                for comps in itertools.product(*comp_lists):
                    self.stats.configurations_enumerated += 1
                    table[(i, cfg, comps)] = self.level_value(
                        i,
                        cfg,
                        comps,
                        lambda c, f, _i=i: table[(_i - 1, c, f)],
                    )
                    self.stats.entries_computed += 1
        self.stats.peak_table_entries = len(table)
        self.table = table  # retained per solve call; inspected by tests
        cfg, comps = self.initial_state()
        return table[(self.height, cfg, comps)]

    def solve_no_memo(self) -> Fraction:
        def value(i: int, cfg, comps) -> Fraction:
            if i == 0:
                return self.base_value(cfg)
            self.stats.entries_computed += 1
            self.stats.configurations_enumerated += 1
            return self.level_value(i, cfg, comps, lambda c, f: value(i - 1, c, f))

        cfg, comps = self.initial_state()
        return value(self.height, cfg, comps)


def _honest_value(
    tree: TournamentTree, matrix: ProbabilityMatrix, favorite: int
) -> Fraction:
    return reach_distribution(tree, matrix).get(favorite, ZERO)


def optimal_value_for(
    tree: TournamentTree,
    matrix: ProbabilityMatrix,
    coalition: Iterable[int],
    favorite: int,
    mode: Mode = Mode.REACHABLE,
) -> OptResult:
    """Optimal winning probability on a (possibly residual) tree.

    This is the unvalidated core used on residual tournaments, where the
    tree holds only a subset of the instance's players.
    """
    dp = _DP(tree, matrix, coalition, favorite)
    if dp.sk.empty:
        return OptResult(_honest_value(tree, matrix, favorite), mode, dp.stats)
    if mode == Mode.FULL:
        value = dp.solve_full()
    elif mode == Mode.REACHABLE:
        value = dp.solve_reachable()
    elif mode == Mode.LOW_MEMORY:
        value = dp.solve_no_memo()
    else:  # pragma: no cover - exhaustive enum
        raise ValueError(f"unknown mode {mode}")
    return OptResult(value, mode, dp.stats)


def best_response_for(
    tree: TournamentTree,
    matrix: ProbabilityMatrix,
    coalition: Iterable[int],
    favorite: int,
) -> BestResponse:
    """First-round profile maximizing the continuation value.

    The profile covers exactly the coalition players who play in round one
    (leaves at maximum depth).  Ties break lexicographically: all-play
    first, then by player id with PLAY preferred.
    """
    dp = _DP(tree, matrix, coalition, favorite)
    if dp.sk.empty:
        return BestResponse(EMPTY_PROFILE, _honest_value(tree, matrix, favorite))
    r = dp.height
    cfg, comps = dp.initial_state()
    round_one = sorted(
        dp.rep[c] for c in set(cfg) if c in dp.coalition_cls
    )
    if r == 0 or not round_one:
        return BestResponse(EMPTY_PROFILE, dp.solve_reachable())

    memo: dict[tuple, Fraction] = {}

    def value(i: int, c, f) -> Fraction:
        if i == 0:
            return dp.base_value(c)
        key = (i, c, f)
        if key in memo:
            return memo[key]
        result = dp.level_value(i, c, f, lambda cc, ff: value(i - 1, cc, ff))
        memo[key] = result
        return result

    best_value: Optional[Fraction] = None
    best_throws: frozenset[int] = frozenset()
    for throws in dp.profiles(r, cfg):
        total = ZERO
        for new_cfg, new_comps, prob in dp.transition(r, cfg, comps, throws):
            total += prob * value(r - 1, new_cfg, new_comps)
        if best_value is None or total > best_value:
            best_value = total
            best_throws = throws

    actions = tuple(
        (p, Action.THROW if dp.cls_of[p] in best_throws else Action.PLAY)
        for p in round_one
    )
    return BestResponse(StrategyProfile(actions), best_value)


def solve(inst: Instance, mode: Mode = Mode.REACHABLE) -> OptResult:
    """Optimal winning probability of the favorite under coalition play."""
    report = validate_instance(inst)
    if report:
        raise ValidationError(report)
    return optimal_value_for(
        inst.tree, inst.matrix, inst.coalition, inst.favorite, mode
    )


def solve_low_memory(inst: Instance) -> OptResult:
    """Same value as :func:`solve` via pure recursion without a memo table.

    Time grows exponentially with the round count; memory stays polynomial.
    Intended for correctness cross-checks at small scale.
    """
    return solve(inst, Mode.LOW_MEMORY)


def decide(inst: Instance, mode: Mode = Mode.REACHABLE) -> bool:
    """True iff the optimum reaches the instance threshold (exact comparison)."""
    return solve(inst, mode).t_opt >= inst.threshold


def best_response(inst: Instance) -> BestResponse:
    report = validate_instance(inst)
    if report:
        raise ValidationError(report)
    return best_response_for(inst.tree, inst.matrix, inst.coalition, inst.favorite)
