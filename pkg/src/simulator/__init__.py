"""Dense statevector simulation."""

from src.simulator.circuit import Circuit
from src.simulator.gates import Gate, GateKind
from src.simulator.statevector import (
    MAX_QUBITS,
    StateVector,
    apply_circuit,
    apply_gate,
    probability_of,
    sample_counts,
)

__all__ = [
    "MAX_QUBITS",
    "Circuit",
    "Gate",
    "GateKind",
    "StateVector",
    "apply_circuit",
    "apply_gate",
    "probability_of",
    "sample_counts",
]
