"""Overlap sweeps and their multiple-quantum-coherence spectra."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.circuits.grid import PhiGrid
from src.core.exceptions import GridMismatchError
from src.noise.density import DensityMatrix
from src.simulator.bitstrings import popcount


@dataclass
class SweepResult:
    """Per-angle signal over a phase grid.

    ``s_stderr`` is None when it is undefined (a single repetition).
    """

    grid: PhiGrid
    s_values: np.ndarray
    s_stderr: np.ndarray | None = None
    repetitions: int = 1

    def __post_init__(self) -> None:
        self.s_values = np.asarray(self.s_values, dtype=float)
        if self.s_values.shape != (len(self.grid),):
            raise GridMismatchError(
                f"{self.s_values.shape[0]} values for a grid of {len(self.grid)} angles",
                values=int(self.s_values.shape[0]),
                grid=len(self.grid),
            )
        if self.s_stderr is not None:
            self.s_stderr = np.asarray(self.s_stderr, dtype=float)
            if self.s_stderr.shape != self.s_values.shape:
                raise GridMismatchError("stderr length differs from values")
            if np.any(self.s_stderr < 0):
                raise ValueError("stderr must be non-negative")

    @property
    def phis(self) -> np.ndarray:
        return self.grid.angles


@dataclass
class MqcSpectrum:
    """I_q for q = 0..q_max."""

    q_max: int
    i_values: np.ndarray
    i_stderr: np.ndarray | None = None

    def intensity(self, q: int) -> float:
        return float(self.i_values[abs(q)])

    def stderr(self, q: int) -> float | None:
        return None if self.i_stderr is None else float(self.i_stderr[abs(q)])

    def mirrored(self) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
        """(q, I_q, stderr) over q = -q_max..q_max."""
        q = np.arange(-self.q_max, self.q_max + 1)
        values = self.i_values[np.abs(q)]
        errors = None if self.i_stderr is None else self.i_stderr[np.abs(q)]
        return q, values, errors


def aggregate_repetitions(sweeps: Sequence[SweepResult]) -> SweepResult:
    """Mean per angle with standard error over repetitions.

    Raises:
        GridMismatchError: If the sweeps use different grids
    """
    if not sweeps:
        raise GridMismatchError("no sweeps to aggregate")
    grid = sweeps[0].grid
    for sweep in sweeps[1:]:
        if sweep.grid != grid:
            raise GridMismatchError(
                f"grid q_max={sweep.grid.q_max} differs from q_max={grid.q_max}"
            )
    data = np.stack([s.s_values for s in sweeps])
    reps = len(sweeps)
    stderr = data.std(axis=0, ddof=1) / np.sqrt(reps) if reps > 1 else None
    return SweepResult(grid, data.mean(axis=0), stderr, reps)


def dft_amplitude(
    values: np.ndarray, stderr: np.ndarray | None, angles: np.ndarray, q: int
) -> tuple[float, float | None]:
    """|sum_j e^{i q phi_j} v_j| / len and its linearly propagated error."""
    count = len(values)
    phases = np.exp(1j * q * angles)
    z = np.sum(phases * values)
    amplitude = abs(z) / count
    if stderr is None:
        return float(amplitude), None
    if abs(z) > 1e-15:
        gradient = (np.conj(z) * phases).real / abs(z)
        error = np.sqrt(np.sum((gradient * stderr) ** 2)) / count
    else:
        error = np.sqrt(np.sum(stderr**2)) / count
    return float(amplitude), float(error)


def mqc_spectrum(sweep: SweepResult) -> MqcSpectrum:
    """Discrete Fourier amplitudes I_q of the overlap signal, q = 0..q_max.

    Raises:
        GridMismatchError: If the sweep does not cover 2*q_max angles
    """
    q_max = sweep.grid.q_max
    if len(sweep.s_values) != 2 * q_max:
        raise GridMismatchError(f"expected {2 * q_max} points, got {len(sweep.s_values)}")
    angles = sweep.grid.angles
    results = [dft_amplitude(sweep.s_values, sweep.s_stderr, angles, q) for q in range(q_max + 1)]
    values = np.array([r[0] for r in results])
    stderr = None if sweep.s_stderr is None else np.array([r[1] for r in results])
    return MqcSpectrum(q_max, values, stderr)


def exact_overlap_signal(rho: DensityMatrix, grid: PhiGrid) -> np.ndarray:
    """Tr(rho_phi rho) on the grid, rho_phi the collectively rotated state."""
    weights = popcount(np.arange(2**rho.num_qubits))
    order = weights[:, None] - weights[None, :]
    magnitudes = np.abs(rho.matrix) ** 2
    return np.array(
        [float(np.sum(magnitudes * np.cos(order * phi))) for phi in grid.angles]
    )
