"""Bitstring conventions.

Basis index k stores qubit j in bit j. Text labels print qubit 0 rightmost,
so ``int(label, 2)`` recovers the index.
"""

from collections.abc import Mapping

import numpy as np

CountsTable = Mapping[str, float]
"""Bitstring label -> count (or probability for exact runs)."""


def to_label(index: int, num_qubits: int) -> str:
    return format(index, f"0{num_qubits}b")


def to_index(label: str) -> int:
    return int(label, 2)


def zeros_label(num_qubits: int) -> str:
    return "0" * num_qubits


def ones_label(num_qubits: int) -> str:
    return "1" * num_qubits


def excitation(label: str) -> int:
    """Number of qubits in |1>."""
    return label.count("1")


def bit_table(num_qubits: int) -> np.ndarray:
    """Array of shape (2**n, n) with entry [k, j] = bit j of k."""
    indices = np.arange(2**num_qubits)
    return (indices[:, None] >> np.arange(num_qubits)[None, :]) & 1


def popcount(indices: np.ndarray) -> np.ndarray:
    """Vectorised Hamming weight of non-negative integers."""
    indices = np.asarray(indices, dtype=np.int64)
    counts = np.zeros(indices.shape, dtype=np.int64)
    work = indices.copy()
    while np.any(work):
        counts += work & 1
        work >>= 1
    return counts
