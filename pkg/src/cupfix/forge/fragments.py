"""Gadget fragments: small subtournaments with fixed probabilities.

A fragment is a name-labeled subtree plus the probability pairs its
construction pins down.  Fragments compose into full instances (reduction
builders) or convert to standalone instances for direct checks of their
selection claims.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from ..model import (
    DenseMatrix,
    HALF,
    Instance,
    Leaf,
    Inner,
    ONE,
    Player,
    TournamentTree,
    ZERO,
)

NameTree = Union[str, tuple]  # str leaf or (left, right)


class BadParameter(ValueError):
    """Gadget parameters outside the construction's domain."""


class GadgetKind(enum.Enum):
    EXISTENTIAL = "existential"
    UNIVERSAL = "universal"
    CLAUSE = "clause"
    CLAUSE_FIRST_ROUND = "clause-first-round"
    SELECTION = "selection"
    RANDOMIZE = "randomize"


@dataclass
class Fragment:
    """A gadget subtree with its local probability assignments."""

    kind: GadgetKind
    tree: NameTree
    players: tuple[str, ...]
    roles: dict[str, str]
    pairs: dict[tuple[str, str], Fraction]
    slots: tuple[str, ...] = ()
    ordered_dummies: bool = False  # dummy-vs-dummy by order instead of 1/2

    def leaf_names(self) -> list[str]:
        out: list[str] = []
        stack = [self.tree]
        while stack:
            node = stack.pop()
            if isinstance(node, str):
                out.append(node)
            else:
                stack.append(node[1])
                stack.append(node[0])
        return out

    @property
    def height(self) -> int:
        def h(node: NameTree) -> int:
            if isinstance(node, str):
                return 0
            return 1 + max(h(node[0]), h(node[1]))

        return h(self.tree)


def name_tree_to_tree(node: NameTree, id_of: dict[str, int]) -> TournamentTree:
    if isinstance(node, str):
        return Leaf(id_of[node])
    return Inner(name_tree_to_tree(node[0], id_of), name_tree_to_tree(node[1], id_of))


def balanced_name_tree(seq: Sequence[str]) -> NameTree:
    n = len(seq)
    if n & (n - 1) != 0:
        raise BadParameter("balanced fragments need a power-of-two seeding")
    if n == 1:
        return seq[0]
    half = n // 2
    return (balanced_name_tree(seq[:half]), balanced_name_tree(seq[half:]))


def _existential(var: str) -> Fragment:
    q, xt, xf, d = f"q.{var}", f"xT.{var}", f"xF.{var}", f"d.{var}"
    pairs = {
        (q, xt): ONE,
        (xf, d): ONE,
        (xt, xf): ONE,
        (xf, q): ONE,
    }
    return Fragment(
        kind=GadgetKind.EXISTENTIAL,
        tree=balanced_name_tree([q, xt, xf, d]),
        players=(q, xt, xf, d),
        roles={q: "coalition", xt: "variable-player", xf: "variable-player", d: "dummy"},
        pairs=pairs,
    )


def _universal(var: str) -> Fragment:
    yt, yf = f"yT.{var}", f"yF.{var}"
    return Fragment(
        kind=GadgetKind.UNIVERSAL,
        tree=(yt, yf),
        players=(yt, yf),
        roles={yt: "variable-player", yf: "variable-player"},
        pairs={(yt, yf): HALF},
    )


def _clause(tag: str) -> Fragment:
    q = f"qc.{tag}"
    c1, c2, c3 = (f"c{j}.{tag}" for j in (1, 2, 3))
    d1, d2, d3, d4 = (f"d{j}.{tag}" for j in (1, 2, 3, 4))
    pairs = {
        (q, c1): ONE,
        (c2, d1): ONE,
        (c3, d2): ONE,
        (d3, d4): ONE,
        (c1, c2): ONE,
        (q, c2): ONE,
        (c3, d3): ONE,
        (c1, c3): ONE,
        (c2, c3): ONE,
        (c3, q): ONE,
    }
    roles = {q: "coalition", c1: "clause-player", c2: "clause-player", c3: "clause-player"}
    roles.update({d: "dummy" for d in (d1, d2, d3, d4)})
    return Fragment(
        kind=GadgetKind.CLAUSE,
        tree=balanced_name_tree([q, c1, c2, d1, c3, d2, d3, d4]),
        players=(q, c1, c2, c3, d1, d2, d3, d4),
        roles=roles,
        pairs=pairs,
    )


def _clause_first_round(tag: str) -> Fragment:
    q1, q2, q3 = (f"q{j}.{tag}" for j in (1, 2, 3))
    c1, c2, c3 = (f"c{j}.{tag}" for j in (1, 2, 3))
    e, d = f"ens.{tag}", f"d.{tag}"
    pairs = {
        (q1, c1): ONE,
        (q2, c2): ONE,
        (q3, c3): ONE,
        (q1, c2): ZERO,
        (q1, c3): ZERO,
        (q2, c1): ZERO,
        (q2, c3): ZERO,
        (q3, c1): ZERO,
        (q3, c2): ZERO,
        (e, q1): ONE,
        (e, q2): ONE,
        (e, q3): ONE,
        (e, c1): ZERO,
        (e, c2): ZERO,
        (e, c3): ZERO,
        (e, d): ONE,
    }
    roles = {q1: "coalition", q2: "coalition", q3: "coalition", e: "ensurance", d: "dummy"}
    roles.update({c: "clause-player" for c in (c1, c2, c3)})
    return Fragment(
        kind=GadgetKind.CLAUSE_FIRST_ROUND,
        tree=balanced_name_tree([q1, c1, q2, c2, q3, c3, e, d]),
        players=(q1, q2, q3, c1, c2, c3, e, d),
        roles=roles,
        pairs=pairs,
    )


def _selection(items: Sequence[str], tag: str) -> Fragment:
    if not items:
        raise BadParameter("selection gadget needs at least one item")
    items = list(items)
    c = f"sel.{tag}"
    # caterpillar: deepest game pairs the coalition player with the first item
    tree: NameTree = (items[0], c)
    for item in items[1:]:
        tree = (item, tree)
    pairs: dict[tuple[str, str], Fraction] = {}
    for i, item in enumerate(items):
        pairs[(c, item)] = ZERO if i == len(items) - 1 else ONE
    for i, j in itertools.combinations(range(len(items)), 2):
        pairs[(items[i], items[j])] = ONE
    return Fragment(
        kind=GadgetKind.SELECTION,
        tree=tree,
        players=tuple(items) + (c,),
        roles={c: "coalition"},
        pairs=pairs,
        ordered_dummies=True,
    )


def _randomize(length: int, tag: str) -> Fragment:
    if length < 1:
        raise BadParameter("randomize gadget needs at least one slot")
    r = f"r.{tag}"
    slots = tuple(f"f{i}.{tag}" for i in range(1, length + 1))
    dummies: list[str] = []

    def dummy() -> str:
        dummies.append(f"d{len(dummies) + 1}.{tag}")
        return dummies[-1]

    spine: NameTree = r
    for i in range(1, length + 1):
        branch: NameTree = slots[i - 1]
        for _ in range(i - 1):
            branch = (branch, dummy())
        spine = (branch, spine)

    pairs: dict[tuple[str, str], Fraction] = {}
    for i, slot in enumerate(slots, start=1):
        pairs[(r, slot)] = ZERO if i == length else HALF
    for i, j in itertools.combinations(range(length), 2):
        pairs[(slots[i], slots[j])] = ONE
    roles = {r: "randomizer"}
    roles.update({s: "slot" for s in slots})
    roles.update({d: "dummy" for d in dummies})
    return Fragment(
        kind=GadgetKind.RANDOMIZE,
        tree=spine,
        players=(r,) + slots + tuple(dummies),
        roles=roles,
        pairs=pairs,
        slots=slots,
        ordered_dummies=True,
    )


def build_gadget(
    kind: GadgetKind,
    *,
    name: str = "g",
    items: Optional[Sequence[str]] = None,
    length: Optional[int] = None,
) -> Fragment:
    """Construct one gadget fragment.

    ``name`` tags the generated player names so fragments compose without
    collisions; SELECTION takes ``items`` and RANDOMIZE takes ``length``.
    """
    if kind == GadgetKind.EXISTENTIAL:
        return _existential(name)
    if kind == GadgetKind.UNIVERSAL:
        return _universal(name)
    if kind == GadgetKind.CLAUSE:
        return _clause(name)
    if kind == GadgetKind.CLAUSE_FIRST_ROUND:
        return _clause_first_round(name)
    if kind == GadgetKind.SELECTION:
        if items is None:
            raise BadParameter("selection gadget needs items")
        return _selection(items, name)
    if kind == GadgetKind.RANDOMIZE:
        if length is None:
            raise BadParameter("randomize gadget needs a slot count")
        return _randomize(length, name)
    raise BadParameter(f"unknown gadget kind {kind}")  # pragma: no cover


def enlarge_sequence(
    seq: Sequence[str], r1: int, r2: int, dummy_namer: Callable[[], str]
) -> list[str]:
    """Pad a balanced seeding so its games start ``r1`` rounds later.

    Every player gets ``2^r1 - 1`` trailing dummies; the block is then
    topped up to ``2^r2`` leaves.  The original winner wins the result.
    """
    n = len(seq)
    if n & (n - 1) != 0:
        raise BadParameter("enlarging needs a power-of-two seeding")
    t = n.bit_length() - 1
    if r1 < 0 or r1 + t > r2:
        raise BadParameter(f"need 0 <= r1 and r1 + {t} <= r2, got ({r1}, {r2})")
    out: list[str] = []
    for player in seq:
        out.append(player)
        out.extend(dummy_namer() for _ in range((1 << r1) - 1))
    out.extend(dummy_namer() for _ in range((1 << r2) - (1 << (r1 + t))))
    return out


def enlarge(frag: Fragment, r1: int, r2: int) -> Fragment:
    """Enlarged copy of a balanced fragment (height ``r2``, same winner)."""
    counter = itertools.count(1)

    def namer() -> str:
        return f"dEn{next(counter)}.{frag.leaf_names()[0]}"

    seq = enlarge_sequence(frag.leaf_names(), r1, r2, namer)
    new_players = [p for p in seq if p not in frag.players]
    roles = dict(frag.roles)
    roles.update({p: "dummy" for p in new_players})
    return Fragment(
        kind=frag.kind,
        tree=balanced_name_tree(seq),
        players=frag.players + tuple(new_players),
        roles=roles,
        pairs=dict(frag.pairs),
        slots=frag.slots,
        ordered_dummies=frag.ordered_dummies,
    )


def fragment_matrix(frag: Fragment) -> DenseMatrix:
    """Resolve a fragment's full matrix: explicit pairs, dummy rules, then 1/2."""
    names = list(frag.players)
    index = {n: i for i, n in enumerate(names)}
    n = len(names)
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = names[i], names[j]
            if (a, b) in frag.pairs:
                p = frag.pairs[(a, b)]
            elif (b, a) in frag.pairs:
                p = 1 - frag.pairs[(b, a)]
            else:
                a_dummy = frag.roles.get(a) == "dummy"
                b_dummy = frag.roles.get(b) == "dummy"
                if a_dummy and b_dummy:
                    p = ONE if frag.ordered_dummies else HALF
                elif a_dummy:
                    p = ZERO
                elif b_dummy:
                    p = ONE
                else:
                    p = HALF
            rows[i][j] = p
            rows[j][i] = 1 - p
    return DenseMatrix(rows)


def fragment_to_instance(
    frag: Fragment, favorite: str, threshold: Fraction = ONE
) -> Instance:
    """Standalone instance over exactly the fragment's players."""
    if favorite not in frag.players:
        raise BadParameter(f"favorite {favorite!r} is not a fragment player")
    names = list(frag.players)
    index = {n: i for i, n in enumerate(names)}
    coalition = frozenset(
        index[p] for p in names if frag.roles.get(p) == "coalition"
    )
    return Instance(
        players=tuple(Player(i, n) for i, n in enumerate(names)),
        tree=name_tree_to_tree(frag.tree, index),
        matrix=fragment_matrix(frag),
        coalition=coalition,
        favorite=index[favorite],
        threshold=Fraction(threshold),
        roles={index[p]: r for p, r in frag.roles.items()},
    )
