"""Adomian decomposition solver for index-3 Euler-Lagrange equations."""

from ._admdae import (
    CONSISTENCY_TOLERANCE,
    DEFAULT_ORDER,
    AdmdaeError,
    ConsistencyReport,
    LoadedSystem,
    MechanicalSystem,
    ReferenceSolution,
    SeriesSolution,
    Stage,
    StagedSolution,
    check_consistency,
    default_stage_length,
    format_series,
    load_system,
    multistage_solve,
    residual_report,
    robot,
    robot_config_json,
    single_stage,
    solve_series,
    structural_residuals,
)

__all__ = [name for name in dir() if not name.startswith("_")]
