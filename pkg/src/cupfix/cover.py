"""Minimum random game covers via bounded search-tree vertex cover.

A random game is a pair with probability strictly between 0 and 1; a cover
is a player set hitting every such pair.  Computing a minimum cover is
vertex cover on the conflict graph, solved here by plain two-way branching
on an uncovered edge (depth bounded by the cover size).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import Instance, ValidationError, validate_instance


@dataclass(frozen=True)
class ConflictGraph:
    """Players as vertices; an edge per nondeterministic pairing."""

    n: int
    edges: frozenset[tuple[int, int]]  # (i, j) with i < j

    def incident(self, v: int) -> list[tuple[int, int]]:
        return [e for e in self.edges if v in e]


def conflict_graph(inst: Instance) -> ConflictGraph:
    report = validate_instance(inst)
    if report:
        raise ValidationError(report)
    edges = set()
    for i in range(inst.n):
        for j in range(i + 1, inst.n):
            p = inst.matrix.p(i, j)
            if 0 != p != 1:
                edges.add((i, j))
    return ConflictGraph(inst.n, frozenset(edges))


def is_random_game_cover(inst: Instance, cover: Iterable[int]) -> bool:
    """True iff every nondeterministic pair has an endpoint in ``cover``."""
    members = set(cover)
    graph = conflict_graph(inst)
    return all(i in members or j in members for i, j in graph.edges)


def _exists_cover(edges: list[tuple[int, int]], k: int) -> bool:
    if not edges:
        return True
    if k == 0:
        return False
    u, v = edges[0]
    return _exists_cover([e for e in edges if u not in e], k - 1) or _exists_cover(
        [e for e in edges if v not in e], k - 1
    )


def minimum_random_game_cover(inst: Instance) -> frozenset[int]:
    """Lexicographically smallest minimum cover (by sorted player ids)."""
    graph = conflict_graph(inst)
    edges = sorted(graph.edges)
    size = 0
    while not _exists_cover(edges, size):
        size += 1

    cover: list[int] = []
    remaining = edges
    budget = size
    while remaining:
        # smallest incident vertex that still allows finishing within budget
        candidates = sorted({v for e in remaining for v in e})
        for v in candidates:
            rest = [e for e in remaining if v not in e]
            if _exists_cover(rest, budget - 1):
                cover.append(v)
                remaining = rest
                budget -= 1
                break
    return frozenset(cover)
