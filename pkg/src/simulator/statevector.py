"""Exact pure-state simulation."""

from dataclasses import dataclass

import numpy as np

from src.core.exceptions import CircuitError, QubitIndexError, SimulationSizeError
from src.simulator.bitstrings import to_index, to_label
from src.simulator.circuit import Circuit
from src.simulator.gates import Gate
from src.simulator.kernels import apply_matrix

MAX_QUBITS = 24
NORM_TOL = 1e-9


@dataclass
class StateVector:
    """Dense amplitudes over 2**n basis states, qubit j in bit j of the index."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise CircuitError(f"state needs at least one qubit, got {self.num_qubits}")
        if self.num_qubits > MAX_QUBITS:
            raise SimulationSizeError(self.num_qubits, MAX_QUBITS)
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (2**self.num_qubits,):
            raise CircuitError(
                f"expected {2**self.num_qubits} amplitudes, got {self.amplitudes.shape}"
            )
        norm = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise CircuitError(f"state is not normalised (norm^2={norm})", norm=norm)

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        """The all-zeros ground state."""
        if num_qubits > MAX_QUBITS:
            raise SimulationSizeError(num_qubits, MAX_QUBITS)
        amplitudes = np.zeros(2**num_qubits, dtype=np.complex128)
        amplitudes[0] = 1.0
        return cls(num_qubits, amplitudes)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def distribution(self, cutoff: float = 1e-15) -> dict[str, float]:
        """Outcome probabilities above a cutoff, keyed by bitstring."""
        probs = self.probabilities()
        return {
            to_label(int(k), self.num_qubits): float(probs[k])
            for k in np.flatnonzero(probs > cutoff)
        }


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate, returning a new state.

    Raises:
        QubitIndexError: If the gate touches a qubit outside the register
    """
    n = state.num_qubits
    for q in gate.qubits:
        if q < 0 or q >= n:
            raise QubitIndexError(q, n)
    if gate.is_diagonal:
        (q,) = gate.qubits
        d0, d1 = np.diag(gate.matrix)
        bit = (np.arange(2**n) >> q) & 1
        amplitudes = state.amplitudes * np.where(bit == 1, d1, d0)
    else:
        amplitudes = apply_matrix(state.amplitudes[None, :], gate.matrix, gate.qubits, n)[0]
    return StateVector(n, amplitudes)


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Apply every gate moment by moment.

    Raises:
        CircuitError: If the circuit and the state differ in size
    """
    if circuit.num_qubits != state.num_qubits:
        raise CircuitError(
            f"circuit has {circuit.num_qubits} qubits, state has {state.num_qubits}",
            circuit_qubits=circuit.num_qubits,
            state_qubits=state.num_qubits,
        )
    for gate in circuit.gates():
        state = apply_gate(state, gate)
    return state


def probability_of(state: StateVector, bitstring: str) -> float:
    """|<bitstring|state>|^2 with qubit 0 as the rightmost character."""
    if len(bitstring) != state.num_qubits:
        raise CircuitError(
            f"bitstring {bitstring!r} has length {len(bitstring)}, expected {state.num_qubits}",
            bitstring=bitstring,
        )
    amplitude = state.amplitudes[to_index(bitstring)]
    return float(abs(amplitude) ** 2)


def sample_counts(
    state: StateVector, shots: int, seed: int | np.random.SeedSequence | None
) -> dict[str, int]:
    """Multinomial sample of measurement outcomes.

    Args:
        state: State to measure in the computational basis
        shots: Number of samples, at least 1
        seed: Seed for numpy's default generator

    Returns:
        Bitstring -> count, summing to shots
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    return {to_label(int(k), state.num_qubits): int(counts[k]) for k in np.flatnonzero(counts)}
