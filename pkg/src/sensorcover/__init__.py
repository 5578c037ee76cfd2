"""Point and set classification for random disk/point set cover."""

from sensorcover.geometry import (
    IncidenceStructure,
    Instance,
    InstanceParams,
    InvalidParameterError,
    build_incidence,
    derive_params,
    sample_instance,
)
from sensorcover.islands import Island, IslandStats, decompose, island_stats
from sensorcover.reduction import (
    Classification,
    PointLabel,
    ResidualProblem,
    SetLabel,
    classify,
    residual_problem,
)
from sensorcover.solver import (
    CoverSolution,
    FullSolution,
    SolveMethod,
    brute_force_cover,
    solve_exact,
    solve_full,
    solve_greedy,
    solve_incidence,
)
from sensorcover.sweep import SweepCellStats, SweepConfig, run_cell, run_grid

__all__ = [
    "Classification",
    "CoverSolution",
    "FullSolution",
    "IncidenceStructure",
    "Instance",
    "InstanceParams",
    "InvalidParameterError",
    "Island",
    "IslandStats",
    "PointLabel",
    "ResidualProblem",
    "SetLabel",
    "SolveMethod",
    "SweepCellStats",
    "SweepConfig",
    "brute_force_cover",
    "build_incidence",
    "classify",
    "decompose",
    "derive_params",
    "island_stats",
    "residual_problem",
    "run_cell",
    "run_grid",
    "sample_instance",
    "solve_exact",
    "solve_full",
    "solve_greedy",
    "solve_incidence",
]
