"""Core domain model: exact rationals, players, matrices, trees, instances.

Every probability in the package is an exact ``fractions.Fraction``; no
solver path ever touches floating point.  Instances are immutable after
construction and safe to share across threads.

The instance file format is JSON::

    { "players": ["e*", "a", "c", "b"],
      "tree": {"l": {"l": "e*", "r": "a"}, "r": {"l": "c", "r": "b"}},
      "matrix": [["0", "1/2", "1/4", "1"], ...],
      "coalition": ["c"],
      "favorite": "e*",
      "threshold": "1/2" }

where a tree node is either a player name (leaf) or ``{"l": node, "r": node}``
and every rational is written in canonical lowest terms as ``"0"``, ``"1"``
or ``"p/q"`` with ``0 < p < q`` and ``gcd(p, q) = 1``.  Matrix row ``i``
holds the win probabilities of player ``i`` against each column player;
diagonal entries must be ``"0"`` and are never read.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

# Validation reason codes.
COMPLEMENTARITY = "Complementarity"
LEAF_BIJECTION = "LeafBijection"
COALITION_MEMBERSHIP = "CoalitionMembership"
FAVORITE_MEMBERSHIP = "FavoriteMembership"
THRESHOLD_RANGE = "ThresholdRange"
TREE_ARITY = "TreeArity"


class InstanceSyntaxError(ValueError):
    """Raised when an instance document cannot be interpreted at all."""


@dataclass(frozen=True)
class Violation:
    """One validation failure: a reason code plus a human-readable detail."""

    code: str
    detail: str

    def __str__(self) -> str:  # pragma: no cover - display helper
        return f"{self.code}: {self.detail}"


class ValidationError(ValueError):
    """Raised when a structurally well-formed instance breaks an invariant."""

    def __init__(self, report: Sequence[Violation]):
        self.report = tuple(report)
        super().__init__("; ".join(str(v) for v in self.report))


class SizeLimitExceeded(ValueError):
    """Raised when an exhaustive computation would exceed its configured cap."""


class MissingRoleAnnotations(ValueError):
    """Raised when an operation needs generator role metadata that is absent."""


_RATIONAL_RE = re.compile(r"^(0|1|[1-9][0-9]*/[1-9][0-9]*)$")


def parse_rational(text: str) -> Fraction:
    """Parse a canonical rational string (``"0"``, ``"1"`` or ``"p/q"``).

    The string must already be in lowest terms with 0 <= p/q <= 1; anything
    else is rejected so that files have exactly one spelling per value.
    """
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise InstanceSyntaxError(f"not a canonical rational string: {text!r}")
    if "/" not in text:
        return Fraction(int(text))
    p_str, q_str = text.split("/")
    p, q = int(p_str), int(q_str)
    if p >= q:
        raise InstanceSyntaxError(f"rational out of [0,1) for p/q form: {text!r}")
    if math.gcd(p, q) != 1:
        raise InstanceSyntaxError(f"rational not in lowest terms: {text!r}")
    return Fraction(p, q)


def format_rational(value: Fraction) -> str:
    """Render a rational in the canonical file spelling."""
    value = Fraction(value)
    if value == 0:
        return "0"
    if value == 1:
        return "1"
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Player:
    """A tournament participant: dense id (position in the player list) + name."""

    id: int
    name: str


# ---------------------------------------------------------------------------
# Tournament trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    player: int

    @property
    def is_leaf(self) -> bool:
        return True


@dataclass(frozen=True)
class Inner:
    left: "TournamentTree"
    right: "TournamentTree"

    def __post_init__(self) -> None:
        if self.left is None or self.right is None:
            raise ValidationError(
                [Violation(TREE_ARITY, "internal node must have two children")]
            )

    @property
    def is_leaf(self) -> bool:
        return False


TournamentTree = Union[Leaf, Inner]


def tree_leaves(tree: TournamentTree) -> list[int]:
    """Leaf player ids in left-to-right order (iterative; trees can be deep)."""
    out: list[int] = []
    stack = [tree]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.append(node.player)
        else:
            stack.append(node.right)
            stack.append(node.left)
    return out


def tree_height(tree: TournamentTree) -> int:
    """Longest root-to-leaf path length (0 for a single leaf)."""
    best = 0
    stack: list[tuple[TournamentTree, int]] = [(tree, 0)]
    while stack:
        node, d = stack.pop()
        if isinstance(node, Leaf):
            best = max(best, d)
        else:
            stack.append((node.left, d + 1))
            stack.append((node.right, d + 1))
    return best


def leaf_depths(tree: TournamentTree) -> list[int]:
    """Depth of every leaf in left-to-right order."""
    out: list[int] = []
    stack: list[tuple[TournamentTree, int]] = [(tree, 0)]
    while stack:
        node, d = stack.pop()
        if isinstance(node, Leaf):
            out.append(d)
        else:
            stack.append((node.right, d + 1))
            stack.append((node.left, d + 1))
    return out


def is_balanced(tree: TournamentTree) -> bool:
    """True iff all leaves share one depth and the leaf count is a power of two."""
    depths = leaf_depths(tree)
    if len(set(depths)) != 1:
        return False
    n = len(depths)
    return n & (n - 1) == 0


def balanced_tree(players: Sequence[int]) -> TournamentTree:
    """Complete binary tree over a power-of-two player sequence (the seeding)."""
    n = len(players)
    if n < 1 or n & (n - 1) != 0:
        raise ValueError("seeding length must be a power of two")
    if n == 1:
        return Leaf(players[0])
    half = n // 2
    return Inner(balanced_tree(players[:half]), balanced_tree(players[half:]))


# ---------------------------------------------------------------------------
# Probability matrices
# ---------------------------------------------------------------------------


class ProbabilityMatrix:
    """Abstract pairwise win-probability table.

    ``p(i, j)`` is the probability that player ``i`` beats player ``j``;
    implementations guarantee ``p(i, j) + p(j, i) = 1`` for ``i != j`` either
    by storage validation (dense) or by construction (rule-backed).
    """

    n: int

    def p(self, i: int, j: int) -> Fraction:
        raise NotImplementedError

    def interchange_classes(self) -> list[tuple[int, ...]]:
        """Partition of player ids into probability-interchangeable groups.

        Two players are interchangeable when their probability rows agree
        against every third player; swapping them changes no observable
        value.  The default is the trivial partition.  Favorites and
        coalition players must end up in singleton groups, which holds
        automatically because callers only merge generator-declared
        uniform groups.
        """
        return [(i,) for i in range(self.n)]

    def validate(self) -> list[Violation]:
        return []

    def equals(self, other: "ProbabilityMatrix") -> bool:
        """Entrywise comparison; intended for tests and small instances."""
        if self.n != other.n:
            return False
        return all(
            self.p(i, j) == other.p(i, j)
            for i in range(self.n)
            for j in range(self.n)
            if i != j
        )


class DenseMatrix(ProbabilityMatrix):
    """Fully materialised matrix; the form every parsed instance uses."""

    def __init__(self, rows: Sequence[Sequence[Fraction]]):
        self.rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        self.n = len(self.rows)
        for row in self.rows:
            if len(row) != self.n:
                raise InstanceSyntaxError("matrix is not square")

    def p(self, i: int, j: int) -> Fraction:
        return self.rows[i][j]

    def validate(self) -> list[Violation]:
        report = []
        for i in range(self.n):
            if self.rows[i][i] != 0:
                report.append(
                    Violation(COMPLEMENTARITY, f"diagonal entry ({i},{i}) is not 0")
                )
            for j in range(i + 1, self.n):
                a, b = self.rows[i][j], self.rows[j][i]
                if not (0 <= a <= 1) or not (0 <= b <= 1):
                    report.append(
                        Violation(COMPLEMENTARITY, f"entry ({i},{j}) outside [0,1]")
                    )
                elif a + b != 1:
                    report.append(
                        Violation(
                            COMPLEMENTARITY,
                            f"p({i},{j}) + p({j},{i}) = {a + b}, expected 1",
                        )
                    )
        return report

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DenseMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)


class RuleMatrix(ProbabilityMatrix):
    """Rule-backed matrix for generated instances too large to materialise.

    Resolution order for ``p(i, j)``: diagonal zero, explicit pair override
    (or the complement of the reverse override), probability-group table
    entry (or complement), then the default.  ``default`` is ``"half"``
    (every remaining pair is 1/2) or ``"order"`` (the lower-id player wins).

    ``uniform_groups`` names groups whose members are interchangeable:
    no override touches them and, under the ``order`` default, no pair
    involving them falls through to the default.  The constructor enforces
    the override condition; generators are responsible for the coverage
    condition and the test suite cross-checks declared groups on small
    instances.
    """

    def __init__(
        self,
        groups: Sequence[str],
        table: Mapping[tuple[str, str], Fraction],
        overrides: Mapping[tuple[int, int], Fraction] | None = None,
        default: str = "half",
        uniform_groups: Iterable[str] = (),
    ):
        if default not in ("half", "order"):
            raise ValueError("default must be 'half' or 'order'")
        self.groups = tuple(groups)
        self.n = len(self.groups)
        self.table = {k: Fraction(v) for k, v in table.items()}
        self.overrides = {k: Fraction(v) for k, v in (overrides or {}).items()}
        self.default = default
        self.uniform_groups = frozenset(uniform_groups)
        self._check_consistency()

    def _check_consistency(self) -> None:
        for (a, b), v in list(self.table.items()):
            if not 0 <= v <= 1:
                raise ValueError(f"table probability out of range for {(a, b)}")
            rev = self.table.get((b, a))
            if rev is not None and (a, b) != (b, a) and rev != 1 - v:
                raise ValueError(f"inconsistent table pair {(a, b)}")
        touched: set[int] = set()
        for (i, j), v in self.overrides.items():
            if not 0 <= v <= 1:
                raise ValueError(f"override probability out of range for {(i, j)}")
            if i == j:
                raise ValueError("override on the diagonal")
            rev = self.overrides.get((j, i))
            if rev is not None and rev != 1 - v:
                raise ValueError(f"inconsistent override pair {(i, j)}")
            touched.update((i, j))
        for idx in touched:
            if self.groups[idx] in self.uniform_groups:
                raise ValueError(
                    f"player {idx} of uniform group {self.groups[idx]!r} "
                    "appears in an override"
                )

    def p(self, i: int, j: int) -> Fraction:
        if i == j:
            return ZERO
        v = self.overrides.get((i, j))
        if v is not None:
            return v
        v = self.overrides.get((j, i))
        if v is not None:
            return 1 - v
        gi, gj = self.groups[i], self.groups[j]
        v = self.table.get((gi, gj))
        if v is not None:
            return v
        v = self.table.get((gj, gi))
        if v is not None:
            return 1 - v
        if self.default == "half":
            return HALF
        return ONE if i < j else ZERO

    def interchange_classes(self) -> list[tuple[int, ...]]:
        by_group: dict[str, list[int]] = {}
        classes: list[tuple[int, ...]] = []
        for idx, g in enumerate(self.groups):
            if g in self.uniform_groups:
                by_group.setdefault(g, []).append(idx)
            else:
                classes.append((idx,))
        classes.extend(tuple(m) for m in by_group.values())
        classes.sort(key=lambda c: c[0])
        return classes


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    """A full problem instance.

    ``roles`` is optional generator metadata (player id -> role string such
    as ``"dummy"``); solvers ignore it, the trimming operation requires it.
    """

    players: tuple[Player, ...]
    tree: TournamentTree
    matrix: ProbabilityMatrix
    coalition: frozenset[int]
    favorite: int
    threshold: Fraction
    roles: Optional[Mapping[int, str]] = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.players)

    def name_of(self, player_id: int) -> str:
        return self.players[player_id].name

    def id_of(self, name: str) -> int:
        for p in self.players:
            if p.name == name:
                return p.id
        raise KeyError(name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.players == other.players
            and self.tree == other.tree
            and self.coalition == other.coalition
            and self.favorite == other.favorite
            and self.threshold == other.threshold
            and self.matrix.equals(other.matrix)
        )


def validate_instance(inst: Instance) -> list[Violation]:
    """Check every type invariant; returns an empty report iff all hold."""
    report: list[Violation] = []
    n = inst.n
    ids = [p.id for p in inst.players]
    if ids != list(range(n)):
        report.append(Violation(LEAF_BIJECTION, "player ids are not dense 0..n-1"))
    names = [p.name for p in inst.players]
    if len(set(names)) != n:
        report.append(Violation(LEAF_BIJECTION, "player names are not unique"))

    leaves = tree_leaves(inst.tree)
    if sorted(leaves) != list(range(n)):
        report.append(
            Violation(
                LEAF_BIJECTION,
                f"tree leaves {sorted(leaves)} are not a bijection onto 0..{n - 1}",
            )
        )
    for c in sorted(inst.coalition):
        if not 0 <= c < n:
            report.append(Violation(COALITION_MEMBERSHIP, f"coalition id {c} unknown"))
    if not 0 <= inst.favorite < n:
        report.append(Violation(FAVORITE_MEMBERSHIP, f"favorite id {inst.favorite} unknown"))
    if not 0 <= inst.threshold <= 1:
        report.append(
            Violation(THRESHOLD_RANGE, f"threshold {inst.threshold} outside [0, 1]")
        )
    report.extend(inst.matrix.validate())
    return report


def _require_valid(inst: Instance) -> None:
    report = validate_instance(inst)
    if report:
        raise ValidationError(report)


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------


def _tree_from_json(node: object, id_of: Mapping[str, int]) -> TournamentTree:
    if isinstance(node, str):
        if node not in id_of:
            raise InstanceSyntaxError(f"tree leaf names unknown player {node!r}")
        return Leaf(id_of[node])
    if isinstance(node, dict):
        if set(node.keys()) != {"l", "r"}:
            raise InstanceSyntaxError("tree node must have exactly keys 'l' and 'r'")
        return Inner(
            _tree_from_json(node["l"], id_of), _tree_from_json(node["r"], id_of)
        )
    raise InstanceSyntaxError(f"tree node must be a name or object, got {type(node)}")


def _tree_to_json(tree: TournamentTree, names: Sequence[str]) -> object:
    if isinstance(tree, Leaf):
        return names[tree.player]
    return {
        "l": _tree_to_json(tree.left, names),
        "r": _tree_to_json(tree.right, names),
    }


def parse_instance(document: str) -> Instance:
    """Parse and validate an instance file; see the module docstring for the format."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InstanceSyntaxError("instance document must be a JSON object")
    missing = {"players", "tree", "matrix", "coalition", "favorite", "threshold"} - set(
        data
    )
    if missing:
        raise InstanceSyntaxError(f"missing fields: {sorted(missing)}")

    names = data["players"]
    if (
        not isinstance(names, list)
        or not names
        or not all(isinstance(x, str) for x in names)
    ):
        raise InstanceSyntaxError("players must be a non-empty list of names")
    if len(set(names)) != len(names):
        raise InstanceSyntaxError("player names must be unique")
    players = tuple(Player(i, name) for i, name in enumerate(names))
    id_of = {name: i for i, name in enumerate(names)}

    tree = _tree_from_json(data["tree"], id_of)

    rows = data["matrix"]
    if not isinstance(rows, list) or len(rows) != len(names):
        raise InstanceSyntaxError("matrix must have one row per player")
    parsed_rows = []
    for row in rows:
        if not isinstance(row, list) or len(row) != len(names):
            raise InstanceSyntaxError("matrix rows must have one entry per player")
        parsed_rows.append([parse_rational(x) for x in row])
    matrix = DenseMatrix(parsed_rows)

    coalition_names = data["coalition"]
    if not isinstance(coalition_names, list):
        raise InstanceSyntaxError("coalition must be a list of names")
    try:
        coalition = frozenset(id_of[name] for name in coalition_names)
    except (KeyError, TypeError) as exc:
        raise InstanceSyntaxError(f"coalition names unknown player: {exc}") from exc

    favorite_name = data["favorite"]
    if favorite_name not in id_of:
        raise InstanceSyntaxError(f"favorite is not a listed player: {favorite_name!r}")

    inst = Instance(
        players=players,
        tree=tree,
        matrix=matrix,
        coalition=coalition,
        favorite=id_of[favorite_name],
        threshold=parse_rational(data["threshold"]),
    )
    _require_valid(inst)
    return inst


def serialize_instance(inst: Instance) -> str:
    """Render an instance in the canonical file format (dense matrix)."""
    names = [p.name for p in inst.players]
    doc = {
        "players": names,
        "tree": _tree_to_json(inst.tree, names),
        "matrix": [
            [format_rational(inst.matrix.p(i, j)) for j in range(inst.n)]
            for i in range(inst.n)
        ],
        "coalition": sorted(names[c] for c in inst.coalition),
        "favorite": names[inst.favorite],
        "threshold": format_rational(inst.threshold),
    }
    return json.dumps(doc, indent=1)
