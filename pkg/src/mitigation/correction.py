"""Constrained readout correction of measured counts."""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from src.core.exceptions import EmptyCountsError, SingularCalibrationError
from src.mitigation.calibration import CalibrationMatrix, build_truncated_calibration
from src.mitigation.solver import solve_simplex_lsq
from src.noise.model import ReadoutModel
from src.simulator.bitstrings import zeros_label

logger = logging.getLogger(__name__)

DROPPED_MASS_WARNING = 0.01
SINGULAR_TOL = 1e-12


@dataclass
class MitigatedDistribution:
    """Corrected probabilities over a label set.

    Attributes:
        state_labels: Labels the correction was solved over
        probabilities: Non-negative, summing to 1
        residual: Minimised ||A v - v_mea||^2
        dropped_mass: Measured frequency outside the label set
        degenerate: True when the solver fell back to projecting v_mea
    """

    state_labels: list[str]
    probabilities: np.ndarray
    residual: float = 0.0
    dropped_mass: float = 0.0
    degenerate: bool = False
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.probabilities = np.asarray(self.probabilities, dtype=float)
        if np.any(self.probabilities < 0):
            raise ValueError("mitigated probabilities must be non-negative")
        if abs(self.probabilities.sum() - 1.0) > 1e-8:
            raise ValueError(f"mitigated probabilities sum to {self.probabilities.sum()}")
        self._index = {label: i for i, label in enumerate(self.state_labels)}

    def probability(self, label: str) -> float:
        i = self._index.get(label)
        return 0.0 if i is None else float(self.probabilities[i])

    def as_dict(self) -> dict[str, float]:
        return {s: float(p) for s, p in zip(self.state_labels, self.probabilities, strict=True)}


def _restricted_frequencies(
    counts: Mapping[str, float], labels: Sequence[str]
) -> tuple[np.ndarray, float]:
    total = float(sum(counts.values()))
    if not counts or total <= 0:
        raise EmptyCountsError()
    kept = np.array([counts.get(s, 0.0) for s in labels], dtype=float)
    in_set = kept.sum()
    dropped = 1.0 - in_set / total
    if in_set <= 0:
        return np.full(len(labels), 1.0 / len(labels)), dropped
    return kept / in_set, dropped


def mitigate(counts: Mapping[str, float], calibration: CalibrationMatrix) -> MitigatedDistribution:
    """Solve argmin ||A v - v_mea||^2 on the simplex over the calibration labels.

    Counts outside the label set are dropped; their share is reported as
    ``dropped_mass``.

    Raises:
        EmptyCountsError: If counts are empty
    """
    v_mea, dropped = _restricted_frequencies(counts, calibration.state_labels)
    if dropped > DROPPED_MASS_WARNING:
        logger.warning(f"Dropped {dropped:.2%} of measured mass outside the calibration set")
    solution = solve_simplex_lsq(calibration.matrix, v_mea)
    return MitigatedDistribution(
        calibration.state_labels,
        solution.x,
        residual=solution.residual,
        dropped_mass=max(dropped, 0.0),
        degenerate=solution.degenerate,
    )


def tensored_mitigate(
    counts: Mapping[str, float], readout: ReadoutModel | np.ndarray
) -> MitigatedDistribution:
    """Correction with A approximated as a product of per-qubit confusions.

    Solved over the observed support plus the all-zeros state, so only a
    support-sized block of the product matrix is ever formed. Correlated
    models contribute their single-qubit marginals.

    Raises:
        SingularCalibrationError: If a per-qubit factor is singular
        EmptyCountsError: If counts are empty
    """
    if not isinstance(readout, ReadoutModel):
        readout = ReadoutModel(np.asarray(readout, dtype=float))
    readout = readout.marginal()
    for j, block in enumerate(readout.confusion):
        det = float(np.linalg.det(block))
        if abs(det) < SINGULAR_TOL:
            raise SingularCalibrationError(j, det)
    observed = [s for s, v in counts.items() if v > 0]
    if not observed:
        raise EmptyCountsError()
    support = sorted(set(observed) | {zeros_label(readout.num_qubits)})
    calibration = build_truncated_calibration(support, readout)
    return mitigate(counts, calibration)


def mitigated_zero_probabilities(
    counts_list: Sequence[Mapping[str, float]], calibration: CalibrationMatrix
) -> np.ndarray:
    """Corrected P(0...0) for each counts table."""
    zeros = zeros_label(calibration.num_qubits)
    return np.array([mitigate(c, calibration).probability(zeros) for c in counts_list])
