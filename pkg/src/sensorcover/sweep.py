"""Monte Carlo sweep of classification proportions over a (gamma, phi) grid."""

from __future__ import annotations

import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from sensorcover.geometry import RNG_ALGORITHM, build_incidence, derive_params, sample_instance
from sensorcover.islands import decompose, island_stats
from sensorcover.reduction import PointLabel, SetLabel, classify, residual_problem

METRICS = (
    "uncov_pts",
    "single_pts",
    "collat_pts",
    "indet_pts",
    "noncov_sets",
    "singlecov_sets",
    "collat_sets",
    "indet_sets",
    "n_islands",
    "li_pts",
    "li_sets",
    "isl_std_pts",
    "isl_std_sets",
    "rounds",
)
# Appended only when the sweep runs with redundant-set removal.
OPTIONAL_METRICS = ("redundant_sets",)
RAW_COLUMNS = ("gamma", "phi", "rep", "seed", "M", "N", "a") + METRICS
AGGREGATE_COLUMNS = ("gamma", "phi", "reps") + tuple(
    f"{m}_{suffix}" for m in METRICS for suffix in ("mean", "std")
)


def _metrics(redundant: bool) -> tuple[str, ...]:
    return METRICS + OPTIONAL_METRICS if redundant else METRICS


def default_axis() -> list[float]:
    return [float(v) for v in range(3, 13)]


@dataclass(frozen=True)
class SweepConfig:
    gamma_values: list[float] = field(default_factory=default_axis)
    phi_values: list[float] = field(default_factory=default_axis)
    reps: int = 105
    base_count: int = 1000
    master_seed: int = 0
    workers: int = 1
    progress: bool = False
    redundant_sets: bool = False

    def __post_init__(self):
        for v in list(self.gamma_values) + list(self.phi_values):
            if not v > 0:
                raise ValueError(f"grid values must be positive, got {v}")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.base_count < 1:
            raise ValueError("base_count must be >= 1")


def replication_seed(master_seed: int, gamma_index: int, phi_index: int, rep: int) -> int:
    seq = np.random.SeedSequence([master_seed, gamma_index, phi_index, rep])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Replication:
    """One row of the raw CSV; class quantities are fractions of M or N."""

    gamma: float
    phi: float
    rep: int
    seed: int
    M: int
    N: int
    a: float
    uncov_pts: float
    single_pts: float
    collat_pts: float
    indet_pts: float
    noncov_sets: float
    singlecov_sets: float
    collat_sets: float
    indet_sets: float
    n_islands: int
    li_pts: float
    li_sets: float
    isl_std_pts: float
    isl_std_sets: float
    rounds: int
    redundant_sets: float | None = None


def run_replication(
    gamma: float, phi: float, base_count: int, seed: int, rep: int = 0, redundant_sets: bool = False
) -> Replication:
    params = derive_params(gamma, phi, base_count, seed)
    incidence = build_incidence(sample_instance(params))
    cls = classify(incidence, validate=False, redundant_sets=redundant_sets)
    stats = island_stats(decompose(residual_problem(cls, incidence)))
    M, N = params.M, params.N
    pc = cls.point_counts() / max(M, 1)
    sc = cls.set_counts() / max(N, 1)
    return Replication(
        gamma=params.gamma,
        phi=params.phi,
        rep=rep,
        seed=seed,
        M=M,
        N=N,
        a=params.a,
        uncov_pts=float(pc[PointLabel.UNCOVERED]),
        single_pts=float(pc[PointLabel.SINGLE_COVERED]),
        collat_pts=float(pc[PointLabel.COLLATERAL]),
        indet_pts=float(pc[PointLabel.INDETERMINATE]),
        noncov_sets=float(sc[SetLabel.NON_COVERING]),
        singlecov_sets=float(sc[SetLabel.SINGLE_COVERING]),
        collat_sets=float(sc[SetLabel.COLLATERAL]),
        indet_sets=float(sc[SetLabel.INDETERMINATE]),
        n_islands=stats.n_islands,
        li_pts=stats.largest_points / max(M, 1),
        li_sets=stats.largest_sets / max(N, 1),
        isl_std_pts=stats.std_points,
        isl_std_sets=stats.std_sets,
        rounds=cls.rounds,
        redundant_sets=float(sc[SetLabel.REDUNDANT]) if redundant_sets else None,
    )


@dataclass(frozen=True)
class SweepCellStats:
    """Aggregates for one grid cell; standard deviations are population (ddof=0) over reps."""

    gamma: float
    phi: float
    reps: int
    mean: dict[str, float]
    std: dict[str, float]
    replications: tuple[Replication, ...] = field(repr=False)

    @property
    def redundant(self) -> bool:
        return self.replications[0].redundant_sets is not None

    def stderr(self, metric: str) -> float:
        """Standard error of the mean, from the sample standard deviation."""
        if self.reps < 2:
            return float("nan")
        vals = np.array([getattr(r, metric) for r in self.replications], dtype=np.float64)
        return float(vals.std(ddof=1) / np.sqrt(self.reps))


def _cell_job(args) -> SweepCellStats:
    gamma, phi, gi, fi, config = args
    return run_cell(gamma, phi, config, gamma_index=gi, phi_index=fi)


def run_cell(gamma: float, phi: float, config: SweepConfig, *, gamma_index: int | None = None,
             phi_index: int | None = None) -> SweepCellStats:
    """Run ``config.reps`` replications at one grid point.

    Seeds derive from ``(master_seed, gamma_index, phi_index, rep)``. The
    indices default to the position of ``gamma``/``phi`` in the config's
    axes, or 0 when the value is not on the axis.
    """
    if gamma_index is None:
        gamma_index = _axis_index(config.gamma_values, gamma)
    if phi_index is None:
        phi_index = _axis_index(config.phi_values, phi)
    reps = tuple(
        run_replication(
            gamma,
            phi,
            config.base_count,
            replication_seed(config.master_seed, gamma_index, phi_index, k),
            k,
            config.redundant_sets,
        )
        for k in range(config.reps)
    )
    table = {
        m: np.array([getattr(r, m) for r in reps], dtype=np.float64) for m in _metrics(config.redundant_sets)
    }
    return SweepCellStats(
        gamma=reps[0].gamma,
        phi=reps[0].phi,
        reps=len(reps),
        mean={m: float(v.mean()) for m, v in table.items()},
        std={m: float(v.std()) for m, v in table.items()},
        replications=reps,
    )


def _axis_index(values, v) -> int:
    for i, x in enumerate(values):
        if x == v:
            return i
    return 0


def run_grid(config: SweepConfig) -> list[SweepCellStats]:
    """All cells, gamma outer and phi inner."""
    jobs = [
        (g, f, gi, fi, config)
        for gi, g in enumerate(config.gamma_values)
        for fi, f in enumerate(config.phi_values)
    ]
    out: list[SweepCellStats] = []

    def report(cell: SweepCellStats) -> None:
        out.append(cell)
        if config.progress:
            print(
                f"[sweep] cell {len(out)}/{len(jobs)} gamma={cell.gamma:.4g} phi={cell.phi:.4g}",
                file=sys.stderr,
                flush=True,
            )

    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for cell in pool.map(_cell_job, jobs):
                report(cell)
    else:
        for job in jobs:
            report(_cell_job(job))
    return out


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6g}"


def _redundant(cells: list[SweepCellStats]) -> bool:
    return bool(cells) and cells[0].redundant


def raw_csv(cells: list[SweepCellStats]) -> str:
    columns = RAW_COLUMNS + (OPTIONAL_METRICS if _redundant(cells) else ())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for cell in cells:
        for r in cell.replications:
            row = asdict(r)
            w.writerow([row[c] if c in ("rep", "seed", "M", "N") else _fmt(row[c]) for c in columns])
    return buf.getvalue()


def aggregate_csv(cells: list[SweepCellStats]) -> str:
    metrics = _metrics(_redundant(cells))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("gamma", "phi", "reps") + tuple(f"{m}_{sfx}" for m in metrics for sfx in ("mean", "std")))
    for cell in cells:
        row = [_fmt(cell.gamma), _fmt(cell.phi), str(cell.reps)]
        for m in metrics:
            row += [_fmt(cell.mean[m]), _fmt(cell.std[m])]
        w.writerow(row)
    return buf.getvalue()


def sweep_metadata(config: SweepConfig) -> str:
    doc = {
        "rng": RNG_ALGORITHM,
        "seed_derivation": "numpy.random.SeedSequence([master_seed, gamma_index, phi_index, rep])",
        "std": "population (ddof=0) over replications",
        "fractions": "point classes over M, set classes over N; li_pts over M, li_sets over N",
        "gamma_values": list(config.gamma_values),
        "phi_values": list(config.phi_values),
        "reps": config.reps,
        "base_count": config.base_count,
        "master_seed": config.master_seed,
        "redundant_sets": config.redundant_sets,
    }
    return json.dumps(doc, indent=2) + "\n"
