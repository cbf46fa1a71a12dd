"""Readout calibration matrices: full, truncated and their CSV layout."""

import csv
import io
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.core.exceptions import CalibrationError, EmptyCountsError
from src.noise.model import FULL_CONFUSION_MAX_QUBITS, ReadoutModel
from src.simulator.bitstrings import to_index, to_label, zeros_label
from src.simulator.seeding import label_id, seed_sequence

logger = logging.getLogger(__name__)


@dataclass
class CalibrationMatrix:
    """Entry (i, j): probability of measuring state_labels[i] after preparing state_labels[j]."""

    state_labels: list[str]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        self.state_labels = list(self.state_labels)
        self.matrix = np.asarray(self.matrix, dtype=float)
        k = len(self.state_labels)
        if k == 0:
            raise CalibrationError("calibration needs at least one state")
        if len(set(self.state_labels)) != k:
            raise CalibrationError("duplicate calibration labels")
        if self.matrix.shape != (k, k):
            raise CalibrationError(f"matrix shape {self.matrix.shape} does not match {k} labels")
        if np.any(self.matrix < -1e-12) or np.any(self.matrix > 1 + 1e-12):
            raise CalibrationError("calibration entries must lie in [0, 1]")
        if np.any(self.matrix.sum(axis=0) > 1 + 1e-9):
            raise CalibrationError("calibration columns sum above 1")
        self._index = {label: i for i, label in enumerate(self.state_labels)}

    @property
    def size(self) -> int:
        return len(self.state_labels)

    @property
    def num_qubits(self) -> int:
        return len(self.state_labels[0])

    def index(self, label: str) -> int | None:
        return self._index.get(label)

    def csv_text(self) -> str:
        """Header ``measured,<prepared labels...>``, one row per measured label."""
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(["measured", *self.state_labels])
        for label, row in zip(self.state_labels, self.matrix, strict=True):
            writer.writerow([label, *(repr(float(v)) for v in row)])
        return buffer.getvalue()

    def to_csv(self, path: Path) -> None:
        Path(path).write_text(self.csv_text(), encoding="utf-8", newline="")

    @classmethod
    def from_csv(cls, path: Path) -> "CalibrationMatrix":
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        if not rows or rows[0][0] != "measured":
            raise CalibrationError(f"{path} is not a calibration CSV")
        labels = rows[0][1:]
        measured = [r[0] for r in rows[1:]]
        if measured != labels:
            raise CalibrationError(f"{path}: row labels differ from column labels")
        matrix = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
        return cls(labels, matrix)


def _product_entries(labels: Sequence[str], readout: ReadoutModel) -> np.ndarray:
    bits = np.array([[(to_index(s) >> j) & 1 for j in range(readout.num_qubits)] for s in labels])
    matrix = np.ones((len(labels), len(labels)))
    for j in range(readout.num_qubits):
        matrix *= readout.confusion[j][bits[:, j][:, None], bits[:, j][None, :]]
    return matrix


def _sample_column(
    prepared: int,
    readout: ReadoutModel,
    shots: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    n = readout.num_qubits
    if readout.full is not None:
        counts = rng.multinomial(shots, readout.full[:, prepared])
        outcomes = np.flatnonzero(counts)
        return outcomes, counts[outcomes]
    shifts = np.arange(n)
    bits = (prepared >> shifts) & 1
    p_flip = np.where(bits == 0, readout.confusion[:, 1, 0], readout.confusion[:, 0, 1])
    flips = (rng.random((shots, n)) < p_flip).astype(np.int64)
    outcomes = prepared ^ (flips << shifts).sum(axis=1)
    return np.unique(outcomes, return_counts=True)


def _sampled(
    labels: Sequence[str], readout: ReadoutModel, shots_per_state: int, seed: int
) -> np.ndarray:
    position = {to_index(s): i for i, s in enumerate(labels)}
    matrix = np.zeros((len(labels), len(labels)))
    stream = label_id("calibration")
    for j, label in enumerate(labels):
        prepared = to_index(label)
        rng = np.random.default_rng(seed_sequence(seed, stream, prepared))
        outcomes, counts = _sample_column(prepared, readout, shots_per_state, rng)
        for outcome, count in zip(outcomes, counts, strict=True):
            i = position.get(int(outcome))
            if i is not None:
                matrix[i, j] = count / shots_per_state
    return matrix


def build_truncated_calibration(
    labels: Sequence[str],
    readout: ReadoutModel,
    shots_per_state: int = 0,
    seed: int = 0,
) -> CalibrationMatrix:
    """Calibration restricted to the given states.

    Outcomes outside the label set are discarded, so columns may sum below 1.

    Args:
        labels: Distinct prepared/measured states
        readout: Readout model to calibrate
        shots_per_state: Samples per prepared state; 0 for exact entries
        seed: Master seed for sampled calibration

    Raises:
        CalibrationError: If labels are empty, duplicated or the wrong width
    """
    labels = list(labels)
    if not labels:
        raise CalibrationError("no calibration labels")
    if len(set(labels)) != len(labels):
        raise CalibrationError("duplicate calibration labels")
    if any(len(s) != readout.num_qubits for s in labels):
        raise CalibrationError(f"labels must have {readout.num_qubits} bits")
    if shots_per_state > 0:
        matrix = _sampled(labels, readout, shots_per_state, seed)
    elif readout.full is not None:
        idx = [to_index(s) for s in labels]
        matrix = readout.full[np.ix_(idx, idx)]
    else:
        matrix = _product_entries(labels, readout)
    logger.info(f"Built {len(labels)}-state calibration ({shots_per_state or 'exact'} shots/state)")
    return CalibrationMatrix(labels, matrix)


def build_full_calibration(
    num_qubits: int, readout: ReadoutModel, shots_per_state: int = 0, seed: int = 0
) -> CalibrationMatrix:
    """Calibration over all 2**n basis states.

    Raises:
        CalibrationError: If n exceeds 10 qubits
    """
    if num_qubits > FULL_CONFUSION_MAX_QUBITS:
        raise CalibrationError(
            f"full calibration supports at most {FULL_CONFUSION_MAX_QUBITS} qubits; "
            f"use a truncated calibration for {num_qubits}",
            num_qubits=num_qubits,
        )
    labels = [to_label(k, num_qubits) for k in range(2**num_qubits)]
    return build_truncated_calibration(labels, readout, shots_per_state, seed)


def select_truncation_states(
    all_counts: Sequence[Mapping[str, float]],
    k: int,
    required: Sequence[str] = (),
) -> list[str]:
    """Top-k states by summed frequency over all experiments.

    The all-zeros state and any required labels are always kept, so the
    result holds fewer than k labels only when fewer states were observed.
    Ties go to the smaller bitstring value.

    Raises:
        EmptyCountsError: If no experiment has any counts
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    weights: dict[str, float] = {}
    for counts in all_counts:
        total = float(sum(counts.values()))
        if total <= 0:
            continue
        for label, value in counts.items():
            weights[label] = weights.get(label, 0.0) + value / total
    if not weights:
        raise EmptyCountsError()

    n = len(next(iter(weights)))
    mandatory = [zeros_label(n), *required]
    selected = list(dict.fromkeys(mandatory))
    chosen = set(selected)
    for label in sorted(weights, key=lambda s: (-weights[s], s)):
        if len(selected) >= k:
            break
        if label not in chosen:
            selected.append(label)
            chosen.add(label)
    return sorted(selected, key=lambda s: (-weights.get(s, 0.0), s))
