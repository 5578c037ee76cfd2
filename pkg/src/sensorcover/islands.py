"""Split the residual problem into independently solvable islands."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from sensorcover.reduction import ResidualProblem


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        parent = self.parent
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra


@dataclass(frozen=True)
class Island:
    """Indeterminate sets (global indices) and the indeterminate points they cover."""

    set_indices: tuple[int, ...]
    point_indices: tuple[int, ...]

    @property
    def n_sets(self) -> int:
        return len(self.set_indices)

    @property
    def n_points(self) -> int:
        return len(self.point_indices)

    def to_dict(self) -> dict:
        return {"sets": list(self.set_indices), "points": list(self.point_indices)}


@dataclass(frozen=True)
class IslandStats:
    n_islands: int
    largest_points: int
    largest_sets: int
    std_points: float
    std_sets: float

    def to_dict(self) -> dict:
        return {
            "n_islands": self.n_islands,
            "largest_points": self.largest_points,
            "largest_sets": self.largest_sets,
            "std_points": self.std_points,
            "std_sets": self.std_sets,
        }


def decompose(residual: ResidualProblem) -> list[Island]:
    """Connected components of the residual bipartite graph.

    Sets sharing an indeterminate point are merged. Islands come back
    ordered by their smallest set index.
    """
    inc = residual.incidence
    n_sets = inc.n_sets
    if n_sets == 0:
        return []
    uf = UnionFind(n_sets)
    indptr = inc.point_indptr.tolist()
    members = inc.point_sets.tolist()
    for p in range(inc.n_points):
        lo, hi = indptr[p], indptr[p + 1]
        first = members[lo]
        for k in range(lo + 1, hi):
            uf.union(first, members[k])

    roots = [uf.find(s) for s in range(n_sets)]
    slot: dict[int, int] = {}
    set_groups: list[list[int]] = []
    # Local set order is ascending in global index, so first-seen order is the output order.
    for s, root in enumerate(roots):
        if root not in slot:
            slot[root] = len(set_groups)
            set_groups.append([])
        set_groups[slot[root]].append(s)
    point_groups: list[list[int]] = [[] for _ in set_groups]
    for p in range(inc.n_points):
        if indptr[p] == indptr[p + 1]:
            raise ValueError(f"residual point {p} has no covering set")
        point_groups[slot[roots[members[indptr[p]]]]].append(p)

    gsets = residual.sets.tolist()
    gpoints = residual.points.tolist()
    return [
        Island(tuple(gsets[s] for s in sg), tuple(gpoints[p] for p in pg))
        for sg, pg in zip(set_groups, point_groups)
    ]


def largest_island(islands: list[Island]) -> Island | None:
    """Most points, then most sets, then smallest set index."""
    if not islands:
        return None
    return min(islands, key=lambda isl: (-isl.n_points, -isl.n_sets, isl.set_indices[0]))


def island_stats(islands: list[Island]) -> IslandStats:
    if not islands:
        return IslandStats(0, 0, 0, 0.0, 0.0)
    big = largest_island(islands)
    pts = np.array([isl.n_points for isl in islands], dtype=np.float64)
    sets = np.array([isl.n_sets for isl in islands], dtype=np.float64)
    return IslandStats(
        n_islands=len(islands),
        largest_points=big.n_points,
        largest_sets=big.n_sets,
        std_points=float(pts.std()),
        std_sets=float(sets.std()),
    )


def islands_to_json(islands: list[Island]) -> str:
    return json.dumps([isl.to_dict() for isl in islands]) + "\n"
