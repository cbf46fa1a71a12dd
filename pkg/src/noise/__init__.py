"""Noise channels, noise models and noisy execution."""

from src.noise.channels import (
    FilledChannel,
    KrausChannel,
    depolarizing,
    depolarizing_fill,
    thermal_relaxation_channel,
)
from src.noise.density import DensityMatrix, density_oracle, mqc_decompose, oracle_distribution
from src.noise.model import EdgeBudget, NoiseModel, ReadoutModel, error_budget
from src.noise.trajectories import execute, run_trajectories

__all__ = [
    "DensityMatrix",
    "EdgeBudget",
    "FilledChannel",
    "KrausChannel",
    "NoiseModel",
    "ReadoutModel",
    "density_oracle",
    "depolarizing",
    "depolarizing_fill",
    "error_budget",
    "execute",
    "mqc_decompose",
    "oracle_distribution",
    "run_trajectories",
    "thermal_relaxation_channel",
]
