"""Colored-graph reduction: multicolored clique to a generalized instance.

One selection gadget picks a vertex per color, one picks an edge per color
pair; two randomize gadgets give every selected vertex and edge a nonzero
chance of reaching the semifinal.  The favorite beats edge players and
loses to vertex players, so it wins surely iff every selected vertex is an
endpoint of the selected edge of its color pair, i.e. iff the selections
form a clique.  The randomizers are the only players in nondeterministic
games, giving a random game cover of size two.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..model import (
    HALF,
    Instance,
    ONE,
    Player,
    RuleMatrix,
    SizeLimitExceeded,
    ZERO,
)
from .fragments import BadParameter, NameTree, name_tree_to_tree


@dataclass(frozen=True)
class ColoredGraph:
    """Vertex classes by color plus cross-color edges (names are strings)."""

    classes: tuple[tuple[str, ...], ...]
    edges: frozenset[tuple[str, str]]  # sorted pairs

    @staticmethod
    def make(
        classes: Sequence[Sequence[str]], edges: Sequence[Sequence[str]]
    ) -> "ColoredGraph":
        """Validate and pad the color classes to equal sizes.

        Padding vertices are fresh and isolated, so they add selectable
        options without changing whether a multicolored clique exists.
        """
        lists = [list(c) for c in classes]
        seen: set[str] = set()
        for cls in lists:
            for v in cls:
                if v in seen:
                    raise BadParameter(f"vertex {v!r} appears in two classes")
                seen.add(v)
        color_of = {v: i for i, cls in enumerate(lists) for v in cls}
        normalized = set()
        for u, v in edges:
            if u not in color_of or v not in color_of:
                raise BadParameter(f"edge ({u}, {v}) uses unknown vertices")
            if color_of[u] == color_of[v]:
                raise BadParameter(f"edge ({u}, {v}) joins vertices of one color")
            normalized.add(tuple(sorted((u, v))))
        width = max((len(c) for c in lists), default=0)
        for i, cls in enumerate(lists):
            pad = 0
            while len(cls) < width:
                pad += 1
                name = f"pad{pad}.V{i + 1}"
                while name in seen:
                    name += "_"
                seen.add(name)
                cls.append(name)
        return ColoredGraph(tuple(tuple(c) for c in lists), frozenset(normalized))

    @property
    def k(self) -> int:
        return len(self.classes)

    def color_of(self, vertex: str) -> int:
        for i, cls in enumerate(self.classes):
            if vertex in cls:
                return i
        raise KeyError(vertex)


def parse_colored_graph(text: str) -> ColoredGraph:
    """Lines ``c <color> <vertex>`` and ``e <u> <v>``; order-insensitive."""
    classes: dict[str, list[str]] = {}
    edges: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "c" and len(tokens) == 3:
            classes.setdefault(tokens[1], []).append(tokens[2])
        elif tokens[0] == "e" and len(tokens) == 3:
            edges.append((tokens[1], tokens[2]))
        else:
            raise BadParameter(f"unrecognized graph line: {raw!r}")
    ordered = [classes[color] for color in sorted(classes)]
    return ColoredGraph.make(ordered, edges)


def find_multicolored_clique(graph: ColoredGraph, limit: int = 20) -> bool:
    """Exhaustive check for a clique with one vertex of each color."""
    total = sum(len(c) for c in graph.classes)
    if total > limit:
        raise SizeLimitExceeded(f"{total} vertices exceeds the search limit {limit}")
    for combo in itertools.product(*graph.classes):
        if all(
            tuple(sorted((a, b))) in graph.edges
            for a, b in itertools.combinations(combo, 2)
        ):
            return True
    return False


def _selection_tree(items: Sequence[str], coalition_name: str) -> NameTree:
    tree: NameTree = (items[0], coalition_name)
    for item in items[1:]:
        tree = (item, tree)
    return tree


def mcc_to_instance(graph: ColoredGraph) -> Instance:
    """Generalized instance; the optimum is 1 iff a multicolored clique exists."""
    k = graph.k
    if k < 2:
        raise BadParameter("need at least two colors")
    pair_list = list(itertools.combinations(range(k), 2))

    names: list[str] = []
    ids: dict[str, int] = {}
    groups: list[str] = []
    roles: dict[int, str] = {}

    def player(name: str, group: str, role: str) -> str:
        ids[name] = len(names)
        names.append(name)
        groups.append(group)
        roles[ids[name]] = role
        return name

    dummy_count = 0

    def dummy(group: str) -> str:
        nonlocal dummy_count
        dummy_count += 1
        return player(f"d{dummy_count}", group, "dummy")

    overrides: dict[tuple[int, int], Fraction] = {}
    table: dict[tuple[str, str], Fraction] = {}

    def set_pair(a: str, b: str, p: Fraction) -> None:
        overrides[(ids[a], ids[b])] = p

    estar = player("e*", "estar", "favorite")
    coalition: list[str] = []

    def build_selection(tag: str, item_names: Sequence[str], slot_group: str) -> NameTree:
        sel = player(f"sel.{tag}", slot_group, "coalition")
        coalition.append(sel)
        for i, item in enumerate(item_names):
            set_pair(sel, item, ZERO if i == len(item_names) - 1 else ONE)
        for i, j in itertools.combinations(range(len(item_names)), 2):
            set_pair(item_names[i], item_names[j], ONE)
        return _selection_tree(list(item_names), sel)

    def randomize_tree(slot_subtrees: Sequence[NameTree], r_name: str) -> NameTree:
        spine: NameTree = r_name
        for i in range(1, len(slot_subtrees) + 1):
            branch = slot_subtrees[i - 1]
            for _ in range(i - 1):
                branch = (branch, dummy("dummy"))
            spine = (branch, spine)
        return spine

    # T1: vertex selection gadgets in the first k slots, dummies after.
    ell1 = max(k, len(pair_list))
    vertex_name = {v: f"v.{v}" for cls in graph.classes for v in cls}
    t1_slots: list[NameTree] = []
    for i in range(1, ell1 + 1):
        slot_group = f"T1.s{i}"
        if i <= k:
            items = [
                player(vertex_name[v], slot_group, "vertex-player")
                for v in graph.classes[i - 1]
            ]
            t1_slots.append(build_selection(f"V{i}", items, slot_group))
        else:
            t1_slots.append(dummy(slot_group))
    r1 = player("rand.1", "r1", "randomizer")
    t1 = randomize_tree(t1_slots, r1)

    # T2: edge selection gadgets per color pair; empty pairs and short lists
    # are padded with phantom non-edges (beaten by every involved vertex).
    by_pair: dict[tuple[int, int], list[tuple[str, str]]] = {p: [] for p in pair_list}
    for u, v in sorted(graph.edges):
        cu, cv = graph.color_of(u), graph.color_of(v)
        by_pair[tuple(sorted((cu, cv)))].append((u, v))
    width = max(max((len(es) for es in by_pair.values()), default=0), 1)

    edge_players: list[str] = []
    edge_endpoints: dict[str, tuple[str, str]] = {}
    edge_colors: dict[str, tuple[int, int]] = {}
    ell2 = len(pair_list)
    use_shield = ell2 < 2
    t2_slots: list[NameTree] = []
    for idx, (i, j) in enumerate(pair_list, start=1):
        slot_group = f"T2.s{idx}"
        items = []
        for u, v in by_pair[(i, j)]:
            name = player(f"e.{u}|{v}", slot_group, "edge-player")
            edge_endpoints[name] = (u, v)
            edge_colors[name] = (i, j)
            items.append(name)
        for extra in range(width - len(items)):
            name = player(f"e.none{extra + 1}.E{i + 1}.{j + 1}", slot_group, "edge-player")
            edge_endpoints[name] = ("", "")
            edge_colors[name] = (i, j)
            items.append(name)
        edge_players.extend(items)
        t2_slots.append(build_selection(f"E{i + 1}.{j + 1}", items, slot_group))
    shield: Optional[str] = None
    if use_shield:
        shield = player("shield", "T2.s2", "shield")
        t2_slots.append(shield)
        ell2 = 2
    r2 = player("rand.2", "r2", "randomizer")
    t2 = randomize_tree(t2_slots, r2)

    tree_names: NameTree = ((t1, t2), estar)

    # vertex vs edge: the vertex wins iff its color is involved and it is
    # not an endpoint; the favorite loses to vertices and beats edges.
    for v, vname in vertex_name.items():
        color = graph.color_of(v)
        for ename in edge_players:
            involved = color in edge_colors[ename]
            endpoint = v in edge_endpoints[ename]
            set_pair(vname, ename, ONE if involved and not endpoint else ZERO)
        set_pair(estar, vname, ZERO)
    for ename in edge_players:
        set_pair(estar, ename, ONE)

    # slot adoption rules, per randomize gadget
    for t, ell, r_group in (("T1", ell1, "r1"), ("T2", ell2, "r2")):
        for i in range(1, ell + 1):
            table[(r_group, f"{t}.s{i}")] = ZERO if i == ell else HALF
        for i, j in itertools.combinations(range(1, ell + 1), 2):
            table[(f"{t}.s{i}", f"{t}.s{j}")] = ONE

    # dummies lose to every non-dummy group; dummy-vs-dummy keeps the
    # global fixed order (the matrix default).
    for g in sorted(set(groups)):
        if g != "dummy":
            table[("dummy", g)] = ZERO
    if shield is not None:
        for i in range(1, ell1 + 1):
            table[("T2.s2", f"T1.s{i}")] = ONE
        table[("estar", "T2.s2")] = ONE

    matrix = RuleMatrix(
        groups=groups,
        table=table,
        overrides=overrides,
        default="order",
        uniform_groups=(),
    )
    return Instance(
        players=tuple(Player(i, n) for i, n in enumerate(names)),
        tree=name_tree_to_tree(tree_names, ids),
        matrix=matrix,
        coalition=frozenset(ids[c] for c in coalition),
        favorite=ids[estar],
        threshold=ONE,
        roles=roles,
    )
