"""Readout calibration and constrained correction."""

from src.mitigation.calibration import (
    CalibrationMatrix,
    build_full_calibration,
    build_truncated_calibration,
    select_truncation_states,
)
from src.mitigation.convergence import ConvergenceRow, convergence_study
from src.mitigation.correction import (
    MitigatedDistribution,
    mitigate,
    mitigated_zero_probabilities,
    tensored_mitigate,
)
from src.mitigation.solver import (
    SimplexSolution,
    kkt_multipliers,
    project_to_simplex,
    solve_simplex_lsq,
)

__all__ = [
    "CalibrationMatrix",
    "ConvergenceRow",
    "MitigatedDistribution",
    "SimplexSolution",
    "build_full_calibration",
    "build_truncated_calibration",
    "convergence_study",
    "kkt_multipliers",
    "mitigate",
    "mitigated_zero_probabilities",
    "project_to_simplex",
    "select_truncation_states",
    "solve_simplex_lsq",
    "tensored_mitigate",
]
