"""Exact density-matrix oracle for small registers."""

from dataclasses import dataclass

import numpy as np

from src.core.exceptions import CircuitError, SimulationSizeError
from src.noise.channels import dephasing
from src.noise.model import NoiseModel
from src.noise.trajectories import OpKind, compile_program
from src.simulator.bitstrings import popcount, to_label
from src.simulator.circuit import Circuit
from src.simulator.kernels import apply_matrix, conjugate
from src.simulator.statevector import StateVector

MAX_DENSITY_QUBITS = 8


@dataclass
class DensityMatrix:
    """Mixed state on at most MAX_DENSITY_QUBITS qubits."""

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.num_qubits > MAX_DENSITY_QUBITS:
            raise SimulationSizeError(self.num_qubits, MAX_DENSITY_QUBITS)
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        dim = 2**self.num_qubits
        if self.matrix.shape != (dim, dim):
            raise CircuitError(f"expected a {dim}x{dim} matrix, got {self.matrix.shape}")

    def validate(self, tol: float = 1e-10) -> None:
        """Check Hermiticity, unit trace and positivity.

        Raises:
            CircuitError: If any property fails
        """
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > tol:
            raise CircuitError("density matrix is not Hermitian")
        if abs(np.trace(self.matrix) - 1.0) > tol:
            raise CircuitError("density matrix trace is not 1")
        if np.linalg.eigvalsh(self.matrix).min() < -1e-8:
            raise CircuitError("density matrix is not positive semidefinite")

    @classmethod
    def from_statevector(cls, state: StateVector) -> "DensityMatrix":
        a = state.amplitudes
        return cls(state.num_qubits, np.outer(a, a.conj()))

    @classmethod
    def ground(cls, num_qubits: int) -> "DensityMatrix":
        matrix = np.zeros((2**num_qubits, 2**num_qubits), dtype=complex)
        matrix[0, 0] = 1.0
        return cls(num_qubits, matrix)

    @classmethod
    def ghz(cls, num_qubits: int) -> "DensityMatrix":
        a = np.zeros(2**num_qubits, dtype=complex)
        a[0] = a[-1] = 1 / np.sqrt(2)
        return cls(num_qubits, np.outer(a, a.conj()))

    @property
    def corner(self) -> complex:
        """Coherence <1...1|rho|0...0>."""
        return complex(self.matrix[-1, 0])

    def probabilities(self) -> np.ndarray:
        return np.clip(np.diag(self.matrix).real, 0.0, None)

    def purity(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))

    def ghz_fidelity(self) -> float:
        """<GHZ|rho|GHZ>."""
        m = self.matrix
        return float(0.5 * (m[0, 0] + m[-1, -1]).real + m[-1, 0].real)


def density_oracle(circuit: Circuit, noise: NoiseModel) -> DensityMatrix:
    """Exact evolution of |0...0><0...0| through the circuit and its noise.

    Drift is replaced by its shot average: each half-moment of length t
    dephases qubits by exp(-sigma^2 t^2 / 2). This Markovian stand-in
    cannot show the echo of a refocusing pulse, so trajectories converge to
    this oracle only when drift_sigma is 0.

    Raises:
        SimulationSizeError: If the circuit has more than 8 qubits
    """
    n = circuit.num_qubits
    if n > MAX_DENSITY_QUBITS:
        raise SimulationSizeError(n, MAX_DENSITY_QUBITS)
    program = compile_program(circuit, noise)
    rho = DensityMatrix.ground(n).matrix
    for op in program.ops:
        if op.kind is OpKind.UNITARY:
            rho = conjugate(rho, op.matrix, op.qubits, n)
        elif op.kind is OpKind.CHANNEL:
            rho = sum(conjugate(rho, k, op.qubits, n) for k in op.channel.operators)
        else:
            factor = float(np.exp(-(noise.drift_sigma * op.tau) ** 2 / 2))
            channel = dephasing(factor)
            for q in range(n):
                rho = sum(conjugate(rho, k, (q,), n) for k in channel.operators)
    return DensityMatrix(n, rho)


def oracle_distribution(circuit: Circuit, noise: NoiseModel) -> dict[str, float]:
    """Exact outcome distribution including readout confusion."""
    n = circuit.num_qubits
    probs = density_oracle(circuit, noise).probabilities()
    readout = noise.readout_for(circuit)
    if readout is not None:
        if readout.full is not None:
            probs = readout.full @ probs
        else:
            vector = probs[None, :].astype(complex)
            for j in range(n):
                vector = apply_matrix(vector, readout.confusion[j], (j,), n)
            probs = vector[0].real
    probs = probs / probs.sum()
    return {to_label(int(k), n): float(probs[k]) for k in np.flatnonzero(probs > 1e-15)}


def mqc_decompose(rho: DensityMatrix) -> np.ndarray:
    """Exact MQC intensities Tr(rho_q rho_-q) for q = -n..n.

    rho_q keeps the elements |m><m'| with excitation difference
    w(m) - w(m') = q. Entry q + n of the result holds I_q.

    Raises:
        SimulationSizeError: If rho has more than 8 qubits
        CircuitError: If rho is not Hermitian, unit-trace and positive
    """
    n = rho.num_qubits
    if n > MAX_DENSITY_QUBITS:
        raise SimulationSizeError(n, MAX_DENSITY_QUBITS)
    rho.validate()
    m = rho.matrix
    order = excitation_order(n)
    intensities = np.zeros(2 * n + 1)
    for q in range(-n, n + 1):
        block = np.where(order == q, m, 0)
        partner = np.where(order == -q, m, 0)
        intensities[q + n] = float(np.sum(block * partner.T).real)
    return intensities


def excitation_order(num_qubits: int) -> np.ndarray:
    """w(m) - w(m') for every matrix element |m><m'|."""
    weights = popcount(np.arange(2**num_qubits))
    return weights[:, None] - weights[None, :]
