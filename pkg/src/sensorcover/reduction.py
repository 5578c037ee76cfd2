"""Iterative point/set classification and the residual subproblem.

The fixpoint runs in rounds. In each round every active point with exactly
one active coverer fires at once, so the outcome does not depend on the
order in which points or sets are stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from sensorcover.geometry import IncidenceError, IncidenceStructure


class PointLabel(IntEnum):
    UNCOVERED = 0
    SINGLE_COVERED = 1
    COLLATERAL = 2
    INDETERMINATE = 3

    @property
    def wire_name(self) -> str:
        return _POINT_NAMES[self]


class SetLabel(IntEnum):
    NON_COVERING = 0
    SINGLE_COVERING = 1
    COLLATERAL = 2
    INDETERMINATE = 3
    # Only produced with ``classify(..., redundant_sets=True)``.
    REDUNDANT = 4

    @property
    def wire_name(self) -> str:
        return _SET_NAMES[self]


_POINT_NAMES = {
    PointLabel.UNCOVERED: "Uncovered",
    PointLabel.SINGLE_COVERED: "SingleCovered",
    PointLabel.COLLATERAL: "Collateral",
    PointLabel.INDETERMINATE: "Indeterminate",
}
_SET_NAMES = {
    SetLabel.NON_COVERING: "NonCovering",
    SetLabel.SINGLE_COVERING: "SingleCovering",
    SetLabel.COLLATERAL: "Collateral",
    SetLabel.INDETERMINATE: "Indeterminate",
    SetLabel.REDUNDANT: "Redundant",
}
_POINT_FROM_NAME = {v: k for k, v in _POINT_NAMES.items()}
_SET_FROM_NAME = {v: k for k, v in _SET_NAMES.items()}


@dataclass(frozen=True)
class Classification:
    """Labels for every point and set, stored as int8 codes of the label enums."""

    point_labels: np.ndarray
    set_labels: np.ndarray
    necessary_sets: np.ndarray
    rounds: int

    @property
    def n_points(self) -> int:
        return len(self.point_labels)

    @property
    def n_sets(self) -> int:
        return len(self.set_labels)

    def point_counts(self) -> np.ndarray:
        """Number of points per :class:`PointLabel`, indexed by label value."""
        return np.bincount(self.point_labels, minlength=4)

    def set_counts(self) -> np.ndarray:
        """Number of sets per :class:`SetLabel`; the REDUNDANT slot is 0 unless that mode ran."""
        return np.bincount(self.set_labels, minlength=5)

    def points_with(self, label: PointLabel) -> np.ndarray:
        return np.flatnonzero(self.point_labels == label)

    def sets_with(self, label: SetLabel) -> np.ndarray:
        return np.flatnonzero(self.set_labels == label)

    def to_dict(self) -> dict:
        return {
            "point_labels": [_POINT_NAMES[PointLabel(v)] for v in self.point_labels.tolist()],
            "set_labels": [_SET_NAMES[SetLabel(v)] for v in self.set_labels.tolist()],
            "necessary_sets": self.necessary_sets.tolist(),
            "rounds": self.rounds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> Classification:
        return cls(
            point_labels=np.array([_POINT_FROM_NAME[n] for n in doc["point_labels"]], dtype=np.int8),
            set_labels=np.array([_SET_FROM_NAME[n] for n in doc["set_labels"]], dtype=np.int8),
            necessary_sets=np.array(doc["necessary_sets"], dtype=np.int64),
            rounds=int(doc["rounds"]),
        )


def _edges_of(indptr: np.ndarray, members: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row and member index of every entry belonging to ``rows``."""
    lo, hi = indptr[rows], indptr[rows + 1]
    counts = hi - lo
    total = int(counts.sum())
    owner = np.repeat(rows, counts)
    pos = np.arange(total) + np.repeat(lo - (np.cumsum(counts) - counts), counts)
    return owner, members[pos]


def _dominated(incidence: IncidenceStructure, s_active: np.ndarray, p_active: np.ndarray) -> np.ndarray:
    """Active sets whose active points lie inside another active set's.

    Among sets with identical active points the lowest index survives.
    """
    live = np.flatnonzero(s_active).tolist()
    act = {}
    for s in live:
        pts = incidence.points_of(s)
        act[s] = frozenset(pts[p_active[pts]].tolist())
    out = []
    for s in live:
        mine = act[s]
        if not mine:
            continue
        probe = min(mine)
        for t in incidence.sets_of(probe).tolist():
            if t == s or t not in act:
                continue
            other = act[t]
            if mine < other or (mine == other and t < s):
                out.append(s)
                break
    return np.array(out, dtype=np.int64)


def classify(incidence: IncidenceStructure, *, validate: bool = True, redundant_sets: bool = False) -> Classification:
    """Run the reduction fixpoint over ``incidence``.

    Each round: active points with one active coverer become SingleCovered
    and their coverer becomes necessary; remaining active points inside a
    necessary set become Collateral; active sets left without active points
    become Collateral. Rounds repeat until nothing changes. ``rounds``
    counts the rounds that changed at least one label.

    With ``redundant_sets=True`` each round also drops every active set whose
    active points are contained in another active set (label REDUNDANT).
    This keeps the minimum cover size but not the cost-independence, the
    necessity property or index-order invariance for duplicate sets.
    """
    if validate:
        incidence.validate()
    M, N = incidence.n_points, incidence.n_sets
    point_labels = np.full(M, -1, dtype=np.int8)
    set_labels = np.full(N, -1, dtype=np.int8)

    deg = incidence.point_degrees.copy()
    sizes = incidence.set_sizes
    point_labels[deg == 0] = PointLabel.UNCOVERED
    set_labels[sizes == 0] = SetLabel.NON_COVERING
    p_active = deg > 0
    s_active = sizes > 0
    edge_p, edge_s = incidence.edge_rows()

    def deactivate_sets(sets: np.ndarray) -> None:
        s_active[sets] = False
        _, pts = _edges_of(incidence.set_indptr, incidence.set_points, sets)
        np.subtract.at(deg, pts, 1)

    rounds = 0
    while True:
        changed = False

        single = np.flatnonzero(p_active & (deg == 1))
        if single.size:
            owner, coverers = _edges_of(incidence.point_indptr, incidence.point_sets, single)
            live = s_active[coverers]
            if np.bincount(owner[live], minlength=M)[single].min() != 1:
                raise IncidenceError("active coverer count out of sync with set states")
            new_nec = np.unique(coverers[live])
            point_labels[single] = PointLabel.SINGLE_COVERED
            p_active[single] = False
            set_labels[new_nec] = SetLabel.SINGLE_COVERING
            _, swept = _edges_of(incidence.set_indptr, incidence.set_points, new_nec)
            swept = swept[p_active[swept]]
            point_labels[swept] = PointLabel.COLLATERAL
            p_active[swept] = False
            deactivate_sets(new_nec)
            changed = True

        live_edges = s_active[edge_s] & p_active[edge_p]
        still = np.bincount(edge_s[live_edges], minlength=N)
        exhausted = np.flatnonzero(s_active & (still == 0))
        if exhausted.size:
            set_labels[exhausted] = SetLabel.COLLATERAL
            deactivate_sets(exhausted)
            changed = True

        if redundant_sets:
            dominated = _dominated(incidence, s_active, p_active)
            if dominated.size:
                set_labels[dominated] = SetLabel.REDUNDANT
                deactivate_sets(dominated)
                changed = True

        if not changed:
            break
        rounds += 1

    if np.any(p_active & (deg < 2)):
        raise IncidenceError("active point left with fewer than two coverers")
    point_labels[p_active] = PointLabel.INDETERMINATE
    set_labels[s_active] = SetLabel.INDETERMINATE
    necessary = np.flatnonzero(set_labels == SetLabel.SINGLE_COVERING)
    for arr in (point_labels, set_labels, necessary):
        arr.setflags(write=False)
    return Classification(point_labels, set_labels, necessary, rounds)


@dataclass(frozen=True)
class ResidualProblem:
    """Indeterminate points and sets with their incidence in local indices.

    Local point ``i`` is global point ``points[i]``; likewise for sets.
    """

    points: np.ndarray
    sets: np.ndarray
    incidence: IncidenceStructure

    @property
    def empty(self) -> bool:
        return len(self.sets) == 0


def residual_problem(classification: Classification, incidence: IncidenceStructure) -> ResidualProblem:
    points = classification.points_with(PointLabel.INDETERMINATE)
    sets = classification.sets_with(SetLabel.INDETERMINATE)
    local_p = np.full(incidence.n_points, -1, dtype=np.int64)
    local_p[points] = np.arange(len(points))
    local_s = np.full(incidence.n_sets, -1, dtype=np.int64)
    local_s[sets] = np.arange(len(sets))
    edge_p, edge_s = incidence.edge_rows()
    keep = (local_p[edge_p] >= 0) & (local_s[edge_s] >= 0)
    restricted = IncidenceStructure.from_pairs(
        local_p[edge_p[keep]], local_s[edge_s[keep]], len(points), len(sets)
    )
    return ResidualProblem(points, sets, restricted)
