"""Spectrum stability against the size of the truncated calibration."""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from src.analyzer.spectrum import SweepResult, aggregate_repetitions, mqc_spectrum
from src.circuits.grid import PhiGrid
from src.mitigation.calibration import (
    build_full_calibration,
    build_truncated_calibration,
    select_truncation_states,
)
from src.mitigation.correction import mitigated_zero_probabilities
from src.noise.model import FULL_CONFUSION_MAX_QUBITS, ReadoutModel

logger = logging.getLogger(__name__)


@dataclass
class ConvergenceRow:
    k: int
    num_states: int
    i_0: float
    i_n: float
    i_0_stderr: float | None = None
    i_n_stderr: float | None = None
    full: bool = False


def convergence_study(
    experiments: Sequence[Sequence[Mapping[str, float]]],
    grid: PhiGrid,
    num_qubits: int,
    k_values: Sequence[int],
    readout: ReadoutModel,
    shots_per_state: int = 0,
    seed: int = 0,
    include_full: bool = True,
) -> list[ConvergenceRow]:
    """Mitigated I_0 and I_N for each calibration size.

    Args:
        experiments: Per repetition, the counts for every grid angle
        grid: Phase grid the counts were taken on
        num_qubits: GHZ size N
        k_values: Ascending truncation sizes
        readout: Readout model to calibrate
        shots_per_state: Calibration shots; 0 for exact calibration
        seed: Calibration seed
        include_full: Append a full-matrix row when N allows it

    Returns:
        One row per K, plus the full-matrix row when requested
    """
    k_values = list(k_values)
    if any(b < a for a, b in zip(k_values, k_values[1:], strict=False)):
        raise ValueError(f"k_values must be ascending, got {k_values}")
    flat = [counts for repetition in experiments for counts in repetition]

    def row(calibration, k: int, full: bool) -> ConvergenceRow:
        sweeps = [
            SweepResult(grid, mitigated_zero_probabilities(repetition, calibration))
            for repetition in experiments
        ]
        spectrum = mqc_spectrum(aggregate_repetitions(sweeps))
        result = ConvergenceRow(
            k=k,
            num_states=calibration.size,
            i_0=spectrum.intensity(0),
            i_n=spectrum.intensity(num_qubits),
            i_0_stderr=spectrum.stderr(0),
            i_n_stderr=spectrum.stderr(num_qubits),
            full=full,
        )
        logger.info(f"K={k}: I_0={result.i_0:.4f} I_N={result.i_n:.4f}")
        return result

    rows = []
    for k in k_values:
        labels = select_truncation_states(flat, k)
        calibration = build_truncated_calibration(labels, readout, shots_per_state, seed)
        rows.append(row(calibration, k, False))
    if include_full and num_qubits <= FULL_CONFUSION_MAX_QUBITS:
        calibration = build_full_calibration(num_qubits, readout, shots_per_state, seed)
        rows.append(row(calibration, 2**num_qubits, True))
    return rows
