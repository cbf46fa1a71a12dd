"""Tensor kernels shared by the statevector, trajectory and density paths.

States are arrays of shape (batch, 2**n). Reshaped to (batch,) + (2,) * n,
qubit j lives on axis 1 + n - 1 - j.
"""

from collections.abc import Sequence

import numpy as np


def _axes(qubits: Sequence[int], num_qubits: int) -> list[int]:
    return [num_qubits - q for q in qubits]


def apply_matrix(
    states: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], num_qubits: int
) -> np.ndarray:
    """Apply one k-qubit matrix to every state in a batch.

    Args:
        states: Array of shape (batch, 2**n)
        matrix: (2**k, 2**k) operator, qubits[0] as the high bit
        qubits: Target qubits
        num_qubits: Register size n

    Returns:
        New array of shape (batch, 2**n)
    """
    k = len(qubits)
    batch = states.shape[0]
    tensor = states.reshape((batch,) + (2,) * num_qubits)
    axes = _axes(qubits, num_qubits)
    gate = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(gate, tensor, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(batch, -1)


def _gather(states: np.ndarray, qubits: Sequence[int], num_qubits: int) -> tuple:
    k = len(qubits)
    batch = states.shape[0]
    tensor = states.reshape((batch,) + (2,) * num_qubits)
    axes = _axes(qubits, num_qubits)
    moved = np.moveaxis(tensor, axes, list(range(1, k + 1)))
    return moved, axes


def apply_matrices(
    states: np.ndarray, matrices: np.ndarray, qubits: Sequence[int], num_qubits: int
) -> np.ndarray:
    """Apply a different k-qubit matrix to each state of a batch.

    Args:
        states: Array of shape (batch, 2**n)
        matrices: Array of shape (batch, 2**k, 2**k)
        qubits: Target qubits
        num_qubits: Register size n
    """
    k = len(qubits)
    batch = states.shape[0]
    moved, axes = _gather(states, qubits, num_qubits)
    flat = moved.reshape(batch, 2**k, -1)
    out = np.einsum("bij,bjr->bir", matrices, flat).reshape(moved.shape)
    out = np.moveaxis(out, list(range(1, k + 1)), axes)
    return out.reshape(batch, -1)


def reduced_density(states: np.ndarray, qubits: Sequence[int], num_qubits: int) -> np.ndarray:
    """Reduced density matrices of the given qubits, shape (batch, 2**k, 2**k)."""
    k = len(qubits)
    batch = states.shape[0]
    moved, _ = _gather(states, qubits, num_qubits)
    flat = moved.reshape(batch, 2**k, -1)
    return np.einsum("bir,bjr->bij", flat, flat.conj())


def z_phase_table(num_qubits: int) -> np.ndarray:
    """(2**n, n) table of +1/2 for |0> and -1/2 for |1>, the RZ exponent per qubit."""
    indices = np.arange(2**num_qubits)
    bits = (indices[:, None] >> np.arange(num_qubits)[None, :]) & 1
    return 0.5 - bits


def apply_rz_angles(states: np.ndarray, angles: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Apply RZ(angles[b, j]) to every qubit j of every state b.

    Args:
        states: Array of shape (batch, 2**n)
        angles: Array of shape (batch, n)
        table: Output of z_phase_table(n)
    """
    return states * np.exp(1j * (angles @ table.T))


def apply_left(rho: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], num_qubits: int):
    """M @ rho with M acting on the given qubits, for a (2**n, 2**n) operator."""
    return apply_matrix(rho.T, matrix, qubits, num_qubits).T


def conjugate(rho: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], num_qubits: int):
    """M rho M^dagger for a (2**n, 2**n) operator."""
    left = apply_left(rho, matrix, qubits, num_qubits)
    return apply_left(left.conj().T, matrix, qubits, num_qubits).conj().T
