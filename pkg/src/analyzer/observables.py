"""Observables read off a single counts table."""

from collections.abc import Mapping

import numpy as np

from src.core.exceptions import EmptyCountsError
from src.simulator.bitstrings import excitation


def _total(counts: Mapping[str, float]) -> float:
    total = float(sum(counts.values()))
    if not counts or total <= 0:
        raise EmptyCountsError()
    return total


def _width(counts: Mapping[str, float]) -> int:
    return len(next(iter(counts)))


def s_phi(counts: Mapping[str, float]) -> float:
    """Fraction of shots returning to the all-zeros state."""
    total = _total(counts)
    return float(counts.get("0" * _width(counts), 0)) / total


def populations(counts: Mapping[str, float]) -> tuple[float, float]:
    """(P(0...0), P(1...1)) of a prepare-and-measure run."""
    total = _total(counts)
    n = _width(counts)
    return counts.get("0" * n, 0) / total, counts.get("1" * n, 0) / total


def parity_expectation(counts: Mapping[str, float]) -> float:
    """<Z...Z> estimated from outcome frequencies."""
    total = _total(counts)
    signed = sum((-1) ** excitation(label) * value for label, value in counts.items())
    return float(signed) / total


def excitation_histogram(counts: Mapping[str, float], top_k: int | None = None) -> np.ndarray:
    """Normalised weight per excitation number 0..n.

    Args:
        counts: Outcome table
        top_k: Only use the top_k states by weight (ties by label ascending)
    """
    _total(counts)
    n = _width(counts)
    items = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if top_k is not None:
        items = items[:top_k]
    histogram = np.zeros(n + 1)
    for label, value in items:
        histogram[excitation(label)] += value
    return histogram / histogram.sum()


def excitation_census(counts: Mapping[str, float], top_k: int) -> np.ndarray:
    """Share of the top_k states at each excitation number 0..n.

    Each state counts once regardless of its weight. Ties are ranked by
    label ascending, as in excitation_histogram.
    """
    _total(counts)
    n = _width(counts)
    items = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    census = np.zeros(n + 1)
    for label, _ in items:
        census[excitation(label)] += 1
    return census / census.sum()
