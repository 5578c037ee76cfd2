"""Minimum-cardinality covers: branch-and-bound, greedy, exhaustive oracle, pipeline."""

from __future__ import annotations

import itertools
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from sensorcover.geometry import IncidenceStructure, Instance, build_incidence
from sensorcover.islands import Island, IslandStats, decompose, island_stats, largest_island
from sensorcover.reduction import Classification, PointLabel, classify, residual_problem

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7
BRUTE_FORCE_MAX_SETS = 25


class InfeasibleError(ValueError):
    """Some required point has no candidate set covering it."""


class SizeLimitError(ValueError):
    pass


class SolveMethod(str, Enum):
    EXACT = "Exact"
    GREEDY = "Greedy"
    BRUTE_FORCE = "BruteForce"


@dataclass(frozen=True)
class CoverSolution:
    chosen_sets: tuple[int, ...]
    optimal: bool
    covered_points: int
    method: SolveMethod
    nodes: int = 0

    @property
    def size(self) -> int:
        return len(self.chosen_sets)


class _Masks:
    """Candidate sets as bitmasks over the required points (bit i = i-th required point)."""

    def __init__(self, points: Iterable[int], sets: Iterable[int], incidence: IncidenceStructure):
        self.points = sorted(set(int(p) for p in points))
        self.sets = sorted(set(int(s) for s in sets))
        bit = {p: i for i, p in enumerate(self.points)}
        self.masks = []
        for s in self.sets:
            m = 0
            for p in incidence.points_of(s).tolist():
                i = bit.get(p)
                if i is not None:
                    m |= 1 << i
            self.masks.append(m)
        self.full = (1 << len(self.points)) - 1
        reachable = 0
        for m in self.masks:
            reachable |= m
        if reachable != self.full:
            missing = [p for i, p in enumerate(self.points) if not (reachable >> i) & 1]
            raise InfeasibleError(f"points {missing[:10]} cannot be covered by the candidate sets")


def _greedy_local(masks: list[int], full: int) -> list[int]:
    chosen = []
    uncovered = full
    while uncovered:
        best, best_gain = -1, 0
        for j, m in enumerate(masks):
            gain = (m & uncovered).bit_count()
            if gain > best_gain:
                best, best_gain = j, gain
        chosen.append(best)
        uncovered &= ~masks[best]
    return chosen


def _size_bound(n_points: int, masks: list[int]) -> int:
    biggest = max((m.bit_count() for m in masks), default=0)
    return 0 if n_points == 0 else -(-n_points // biggest)


def solve_greedy(points, sets, incidence: IncidenceStructure) -> CoverSolution:
    """Repeatedly take the set covering the most uncovered points, lowest index on ties."""
    mk = _Masks(points, sets, incidence)
    local = _greedy_local(mk.masks, mk.full)
    chosen = tuple(sorted(mk.sets[j] for j in local))
    optimal = len(chosen) == _size_bound(len(mk.points), mk.masks)
    return CoverSolution(chosen, optimal, len(mk.points), SolveMethod.GREEDY)


def brute_force_cover(points, sets, incidence: IncidenceStructure) -> CoverSolution:
    """Lexicographically smallest minimum cover found by enumerating subsets by size."""
    mk = _Masks(points, sets, incidence)
    if len(mk.sets) > BRUTE_FORCE_MAX_SETS:
        raise SizeLimitError(f"brute force limited to {BRUTE_FORCE_MAX_SETS} sets, got {len(mk.sets)}")
    n = len(mk.sets)
    for k in range(n + 1):
        for combo in itertools.combinations(range(n), k):
            acc = 0
            for j in combo:
                acc |= mk.masks[j]
            if acc == mk.full:
                return CoverSolution(
                    tuple(mk.sets[j] for j in combo), True, len(mk.points), SolveMethod.BRUTE_FORCE
                )
    raise InfeasibleError("no cover exists")  # unreachable after the _Masks check


class _BranchAndBound:
    def __init__(self, masks: list[int], full: int, budget: int):
        self.masks = masks
        self.n_bits = full.bit_length()
        self.coverers = [[j for j, m in enumerate(masks) if (m >> i) & 1] for i in range(self.n_bits)]
        self.budget = budget
        self.nodes = 0
        self.exhausted = False
        incumbent = _greedy_local(masks, full)
        self.best = sorted(incumbent)

    def run(self, full: int) -> None:
        self._search(full, [], 0)

    def _search(self, uncovered: int, chosen: list[int], banned: int) -> None:
        if uncovered == 0:
            if len(chosen) < len(self.best):
                self.best = sorted(chosen)
            return
        if self.nodes >= self.budget:
            self.exhausted = True
            return
        self.nodes += 1

        masks = self.masks
        max_gain = 0
        for j, m in enumerate(masks):
            if not (banned >> j) & 1:
                g = (m & uncovered).bit_count()
                if g > max_gain:
                    max_gain = g
        if max_gain == 0:
            return
        bound = -(-uncovered.bit_count() // max_gain)
        if len(chosen) + bound >= len(self.best):
            return

        # Branch on the uncovered point with the fewest remaining coverers.
        pick, options = -1, None
        rest = uncovered
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            rest ^= low
            opts = [j for j in self.coverers[i] if not (banned >> j) & 1]
            if options is None or len(opts) < len(options):
                pick, options = i, opts
                if len(opts) <= 1:
                    break
        if not options:
            return
        options.sort(key=lambda j: (-(masks[j] & uncovered).bit_count(), j))
        for j in options:
            chosen.append(j)
            self._search(uncovered & ~masks[j], chosen, banned)
            chosen.pop()
            if self.exhausted:
                return
            # Later branches exclude sets already tried at this node.
            banned |= 1 << j


def solve_exact(island: Island, incidence: IncidenceStructure, budget: int = DEFAULT_BUDGET) -> CoverSolution:
    """Minimum cover of the island's points by the island's sets.

    ``incidence`` is indexed by the same (global) ids as the island. The
    search is a depth-first branch-and-bound seeded with the greedy cover;
    past ``budget`` nodes the incumbent is returned with ``optimal=False``.
    """
    if not island.point_indices:
        raise ValueError("island has no points")
    mk = _Masks(island.point_indices, island.set_indices, incidence)
    bb = _BranchAndBound(mk.masks, mk.full, budget)
    bb.run(mk.full)
    chosen = tuple(sorted(mk.sets[j] for j in bb.best))
    return CoverSolution(chosen, not bb.exhausted, len(mk.points), SolveMethod.EXACT, bb.nodes)


def _solve_island_job(args):
    island, incidence, budget = args
    return solve_exact(island, incidence, budget)


@dataclass(frozen=True)
class FullSolution:
    cover: CoverSolution
    classification: Classification
    islands: list[Island]
    island_solutions: list[CoverSolution]
    stats: IslandStats
    reduction_metric: float
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "chosen_sets": list(self.cover.chosen_sets),
            "optimal": self.cover.optimal,
            "method": self.cover.method.value,
            "islands": [
                {
                    "sets": list(isl.set_indices),
                    "points": list(isl.point_indices),
                    "cover_size": sol.size,
                    "optimal": sol.optimal,
                }
                for isl, sol in zip(self.islands, self.island_solutions)
            ],
            "reduction_metric": self.reduction_metric,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"


def solve_incidence(
    incidence: IncidenceStructure, budget: int = DEFAULT_BUDGET, workers: int = 1, redundant_sets: bool = False
) -> FullSolution:
    """Classify, split into islands, solve each island and assemble the cover."""
    cls = classify(incidence, redundant_sets=redundant_sets)
    islands = decompose(residual_problem(cls, incidence))
    jobs = [(isl, incidence, budget) for isl in islands]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            solutions = list(pool.map(_solve_island_job, jobs))
    else:
        solutions = [_solve_island_job(j) for j in jobs]

    warnings = []
    for k, sol in enumerate(solutions):
        if not sol.optimal:
            msg = f"island {k} exceeded the {budget}-node budget; using best cover found"
            log.warning(msg)
            warnings.append(msg)
    chosen = set(cls.necessary_sets.tolist())
    for sol in solutions:
        chosen.update(sol.chosen_sets)
    covered = int((cls.point_labels != PointLabel.UNCOVERED).sum())
    cover = CoverSolution(
        tuple(sorted(chosen)),
        all(s.optimal for s in solutions),
        covered,
        SolveMethod.EXACT,
        sum(s.nodes for s in solutions),
    )
    total = incidence.n_points + incidence.n_sets
    big = largest_island(islands)
    metric = 0.0 if big is None or total == 0 else (big.n_points + big.n_sets) / total
    return FullSolution(cover, cls, islands, solutions, island_stats(islands), metric, warnings)


def solve_full(
    instance: Instance, budget: int = DEFAULT_BUDGET, workers: int = 1, redundant_sets: bool = False
) -> FullSolution:
    return solve_incidence(build_incidence(instance), budget=budget, workers=workers, redundant_sets=redundant_sets)
