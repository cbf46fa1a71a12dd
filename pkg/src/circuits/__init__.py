"""Circuit families and entangling plans."""

from src.circuits.builders import (
    MqcVariant,
    build_ghz_prep,
    build_mqc_circuit,
    build_parity_circuit,
    build_populations_circuit,
)
from src.circuits.grid import PhiGrid, phi_grid
from src.circuits.plan import EntanglingPlan, auto_plan, linear_plan

__all__ = [
    "EntanglingPlan",
    "MqcVariant",
    "PhiGrid",
    "auto_plan",
    "build_ghz_prep",
    "build_mqc_circuit",
    "build_parity_circuit",
    "build_populations_circuit",
    "linear_plan",
    "phi_grid",
]
