"""Random instances of the disk/point coverage problem and their incidence.

Points and disk centers are drawn uniformly in the square ``[0, sqrt(A)]^2``.
Disks are closed and may overhang the square boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

RNG_ALGORITHM = "numpy.random.PCG64"

# Upper bound on grid cells per axis; cells grow beyond r when r is tiny.
_MAX_CELLS_PER_AXIS = 4096


class InvalidParameterError(ValueError):
    """Raised for parameters outside their valid domain."""


class IncidenceError(ValueError):
    """Raised when the two sides of an incidence structure disagree."""


@dataclass(frozen=True)
class InstanceParams:
    M: int
    N: int
    A: float
    a: float
    seed: int = 0

    def __post_init__(self):
        if self.M < 0 or self.N < 0:
            raise InvalidParameterError(f"counts must be non-negative, got M={self.M}, N={self.N}")
        if not (self.A > 0 and math.isfinite(self.A)):
            raise InvalidParameterError(f"region area must be positive, got A={self.A}")
        if not (0 < self.a <= self.A):
            raise InvalidParameterError(f"disk area must lie in (0, A], got a={self.a}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameterError(f"seed must fit in 64 bits, got {self.seed}")

    @property
    def gamma(self) -> float:
        """Expected number of points inside one disk-sized area."""
        return self.M * self.a / self.A

    @property
    def phi(self) -> float:
        """Expected number of disks covering a random location."""
        return self.N * self.a / self.A

    @property
    def side(self) -> float:
        return math.sqrt(self.A)

    def to_dict(self) -> dict:
        return {"M": self.M, "N": self.N, "A": self.A, "a": self.a, "seed": self.seed}


def derive_params(gamma: float, phi: float, base_count: int = 1000, seed: int = 0) -> InstanceParams:
    """Build raw parameters from the two density parameters.

    The region is the unit square and the smaller of ``M`` and ``N`` equals
    ``base_count``. The disk area is chosen so that the realized ``gamma``
    is exact; the realized ``phi`` differs from the request only through
    rounding of ``N``.

    Parameters
    ----------
    gamma : float
        Point density ``M a / A``.
    phi : float
        Set density ``N a / A``.
    base_count : int
        Value of ``min(M, N)``.
    seed : int
        64-bit seed carried into the instance.
    """
    if not (gamma > 0 and math.isfinite(gamma)):
        raise InvalidParameterError(f"gamma must be positive, got {gamma}")
    if not (phi > 0 and math.isfinite(phi)):
        raise InvalidParameterError(f"phi must be positive, got {phi}")
    if base_count < 1:
        raise InvalidParameterError(f"base_count must be >= 1, got {base_count}")
    A = 1.0
    if gamma <= phi:
        M = int(base_count)
        N = int(round(base_count * phi / gamma))
    else:
        N = int(base_count)
        M = int(round(base_count * gamma / phi))
    a = gamma * A / M
    return InstanceParams(M=M, N=N, A=A, a=a, seed=seed)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Instance:
    """A sampled configuration: ``points`` and ``centers`` are ``(k, 2)`` float64 arrays."""

    params: InstanceParams
    points: np.ndarray
    centers: np.ndarray
    radius: float

    def __post_init__(self):
        points = _frozen(np.array(self.points, dtype=np.float64).reshape(-1, 2))
        centers = _frozen(np.array(self.centers, dtype=np.float64).reshape(-1, 2))
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "centers", centers)
        p = self.params
        if len(points) != p.M or len(centers) != p.N:
            raise InvalidParameterError(
                f"expected {p.M} points and {p.N} centers, got {len(points)} and {len(centers)}"
            )
        side = p.side
        for name, arr in (("points", points), ("centers", centers)):
            if arr.size and (arr.min() < 0 or arr.max() > side):
                raise InvalidParameterError(f"{name} must lie in [0, {side}]^2")
        if abs(self.radius**2 * math.pi - p.a) > 1e-12 * p.a:
            raise InvalidParameterError(f"radius {self.radius} inconsistent with disk area {p.a}")

    @property
    def radius_sq(self) -> float:
        return self.radius * self.radius

    def to_json(self) -> str:
        return instance_to_json(self)


def sample_instance(params: InstanceParams) -> Instance:
    """Draw ``M`` points then ``N`` centers i.i.d. uniform over the square."""
    rng = np.random.Generator(np.random.PCG64(params.seed))
    side = params.side
    points = rng.random((params.M, 2)) * side
    centers = rng.random((params.N, 2)) * side
    return Instance(params, points, centers, math.sqrt(params.a / math.pi))


def _csr(rows: np.ndarray, cols: np.ndarray, n_rows: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((cols, rows))
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n_rows), out=indptr[1:])
    return indptr, cols[order].astype(np.int64)


@dataclass(frozen=True, eq=False)
class IncidenceStructure:
    """Bipartite point/disk adjacency held in compressed sparse row form.

    ``point_indptr``/``point_sets`` list the disks containing each point and
    ``set_indptr``/``set_points`` the points inside each disk, both sorted.
    """

    point_indptr: np.ndarray
    point_sets: np.ndarray
    set_indptr: np.ndarray
    set_points: np.ndarray
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @classmethod
    def from_pairs(cls, point_idx, set_idx, n_points: int, n_sets: int) -> IncidenceStructure:
        """Build from parallel arrays of (point, set) memberships."""
        p = np.asarray(point_idx, dtype=np.int64)
        s = np.asarray(set_idx, dtype=np.int64)
        if p.size and (p.min() < 0 or p.max() >= n_points or s.min() < 0 or s.max() >= n_sets):
            raise IncidenceError("membership index out of range")
        pi, ps = _csr(p, s, n_points)
        si, sp = _csr(s, p, n_sets)
        return cls(_frozen(pi), _frozen(ps), _frozen(si), _frozen(sp))

    @classmethod
    def from_points_of_set(cls, points_of_set, n_points: int) -> IncidenceStructure:
        pairs = [(p, s) for s, pts in enumerate(points_of_set) for p in pts]
        p = [q for q, _ in pairs]
        s = [t for _, t in pairs]
        return cls.from_pairs(p, s, n_points, len(points_of_set))

    @classmethod
    def from_lists(cls, sets_of_point, points_of_set) -> IncidenceStructure:
        """Build from both adjacency lists without reconciling them; see :meth:`validate`."""

        def pack(lists):
            indptr = np.zeros(len(lists) + 1, dtype=np.int64)
            indptr[1:] = np.cumsum([len(x) for x in lists])
            flat = np.array([v for x in lists for v in sorted(x)], dtype=np.int64)
            return _frozen(indptr), _frozen(flat)

        pi, ps = pack(sets_of_point)
        si, sp = pack(points_of_set)
        return cls(pi, ps, si, sp)

    def __eq__(self, other):
        if not isinstance(other, IncidenceStructure):
            return NotImplemented
        return all(
            np.array_equal(x, y)
            for x, y in (
                (self.point_indptr, other.point_indptr),
                (self.point_sets, other.point_sets),
                (self.set_indptr, other.set_indptr),
                (self.set_points, other.set_points),
            )
        )

    __hash__ = None

    @property
    def n_points(self) -> int:
        return len(self.point_indptr) - 1

    @property
    def n_sets(self) -> int:
        return len(self.set_indptr) - 1

    @property
    def n_edges(self) -> int:
        return len(self.point_sets)

    def sets_of(self, p: int) -> np.ndarray:
        return self.point_sets[self.point_indptr[p] : self.point_indptr[p + 1]]

    def points_of(self, s: int) -> np.ndarray:
        return self.set_points[self.set_indptr[s] : self.set_indptr[s + 1]]

    @property
    def point_degrees(self) -> np.ndarray:
        return np.diff(self.point_indptr)

    @property
    def set_sizes(self) -> np.ndarray:
        return np.diff(self.set_indptr)

    @property
    def sets_of_point(self) -> list[list[int]]:
        return [self.sets_of(p).tolist() for p in range(self.n_points)]

    @property
    def points_of_set(self) -> list[list[int]]:
        return [self.points_of(s).tolist() for s in range(self.n_sets)]

    def edge_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """Point index and set index of every membership, ordered by set."""
        if "edge_rows" not in self._cache:
            rows = np.repeat(np.arange(self.n_sets, dtype=np.int64), self.set_sizes)
            self._cache["edge_rows"] = (self.set_points, rows)
        return self._cache["edge_rows"]

    def validate(self) -> None:
        """Raise :class:`IncidenceError` unless both sides describe the same relation."""
        if self.point_indptr[-1] != len(self.point_sets) or self.set_indptr[-1] != len(self.set_points):
            raise IncidenceError("index pointer does not match membership array")
        if len(self.point_sets) != len(self.set_points):
            raise IncidenceError(
                f"point side has {len(self.point_sets)} memberships, set side has {len(self.set_points)}"
            )
        if len(self.point_sets) == 0:
            return
        for arr, bound in ((self.point_sets, self.n_sets), (self.set_points, self.n_points)):
            if arr.min() < 0 or arr.max() >= bound:
                raise IncidenceError("membership index out of range")
        p_rows = np.repeat(np.arange(self.n_points), self.point_degrees)
        a = np.sort(p_rows * self.n_sets + self.point_sets)
        s_rows = np.repeat(np.arange(self.n_sets), self.set_sizes)
        b = np.sort(self.set_points * self.n_sets + s_rows)
        if not np.array_equal(a, b):
            raise IncidenceError("point and set adjacency lists disagree")

    def to_dict(self) -> dict:
        return {"sets_of_point": self.sets_of_point, "points_of_set": self.points_of_set}


def build_incidence(instance: Instance) -> IncidenceStructure:
    """Closed-disk membership via a uniform grid of cell side at least ``r``.

    Every point within distance ``r`` of a center lies in the 3x3 block of
    cells around the center's cell, so only those candidates are tested.
    """
    pts, ctr = instance.points, instance.centers
    M, N = len(pts), len(ctr)
    if M == 0 or N == 0:
        return IncidenceStructure.from_pairs([], [], M, N)
    side = instance.params.side
    r2 = instance.radius_sq
    # Slight inflation keeps floor() rounding from pushing a neighbour two cells away.
    cell = max(instance.radius * (1 + 1e-9), side / _MAX_CELLS_PER_AXIS)
    n_cells = int(side // cell) + 1

    pcx = np.minimum((pts[:, 0] // cell).astype(np.int64), n_cells - 1)
    pcy = np.minimum((pts[:, 1] // cell).astype(np.int64), n_cells - 1)
    keys = pcx * n_cells + pcy
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]

    ccx = np.minimum((ctr[:, 0] // cell).astype(np.int64), n_cells - 1)
    ccy = np.minimum((ctr[:, 1] // cell).astype(np.int64), n_cells - 1)
    all_sets = np.arange(N, dtype=np.int64)

    found_p, found_s = [], []
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            nx, ny = ccx + dx, ccy + dy
            ok = (nx >= 0) & (nx < n_cells) & (ny >= 0) & (ny < n_cells)
            s = all_sets[ok]
            k = nx[ok] * n_cells + ny[ok]
            lo = np.searchsorted(sorted_keys, k, side="left")
            hi = np.searchsorted(sorted_keys, k, side="right")
            counts = hi - lo
            total = int(counts.sum())
            if total == 0:
                continue
            cand_s = np.repeat(s, counts)
            starts = np.repeat(lo - (np.cumsum(counts) - counts), counts)
            cand_p = order[np.arange(total) + starts]
            d = pts[cand_p] - ctr[cand_s]
            hit = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] <= r2
            found_p.append(cand_p[hit])
            found_s.append(cand_s[hit])
    if found_p:
        p_idx, s_idx = np.concatenate(found_p), np.concatenate(found_s)
    else:
        p_idx = s_idx = np.empty(0, dtype=np.int64)
    return IncidenceStructure.from_pairs(p_idx, s_idx, M, N)


def naive_incidence(instance: Instance) -> IncidenceStructure:
    """All-pairs membership test; reference for :func:`build_incidence`."""
    pts, ctr = instance.points, instance.centers
    M, N = len(pts), len(ctr)
    if M == 0 or N == 0:
        return IncidenceStructure.from_pairs([], [], M, N)
    dx = pts[:, None, 0] - ctr[None, :, 0]
    dy = pts[:, None, 1] - ctr[None, :, 1]
    p_idx, s_idx = np.nonzero(dx * dx + dy * dy <= instance.radius_sq)
    return IncidenceStructure.from_pairs(p_idx, s_idx, M, N)


def _coords_json(arr: np.ndarray) -> str:
    return "[" + ",".join(f"[{x:.17g},{y:.17g}]" for x, y in arr.tolist()) + "]"


def instance_to_json(instance: Instance) -> str:
    p = instance.params
    params = (
        f'{{"M": {p.M}, "N": {p.N}, "A": {p.A:.17g}, "a": {p.a:.17g}, "seed": {p.seed}}}'
    )
    return (
        "{"
        f'"params": {params}, '
        f'"rng": "{RNG_ALGORITHM}", '
        f'"radius": {instance.radius:.17g}, '
        f'"points": {_coords_json(instance.points)}, '
        f'"centers": {_coords_json(instance.centers)}'
        "}\n"
    )


def instance_from_json(text: str) -> Instance:
    doc = json.loads(text)
    try:
        p = doc["params"]
        params = InstanceParams(
            M=int(p["M"]), N=int(p["N"]), A=float(p["A"]), a=float(p["a"]), seed=int(p.get("seed", 0))
        )
        points = np.array(doc["points"], dtype=np.float64).reshape(-1, 2)
        centers = np.array(doc["centers"], dtype=np.float64).reshape(-1, 2)
        radius = float(doc["radius"])
    except (KeyError, TypeError) as exc:
        raise InvalidParameterError(f"malformed instance document: {exc}") from exc
    return Instance(params, points, centers, radius)
