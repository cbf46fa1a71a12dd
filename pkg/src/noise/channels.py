"""Kraus channels: thermal relaxation, depolarizing, and error-budget fills."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np

from src.core.exceptions import IncompleteChannelError, InvalidChannelParametersError

logger = logging.getLogger(__name__)

COMPLETENESS_TOL = 1e-9

_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive trace-preserving map given by Kraus operators."""

    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise IncompleteChannelError(float("inf"))
        object.__setattr__(self, "operators", ops)
        total = sum(k.conj().T @ k for k in ops)
        deviation = float(np.max(np.abs(total - np.eye(self.dim))))
        if deviation > COMPLETENESS_TOL:
            raise IncompleteChannelError(deviation)

    @classmethod
    def identity(cls, dim: int = 2) -> "KrausChannel":
        return cls((np.eye(dim, dtype=complex),))

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def stacked(self) -> np.ndarray:
        """Operators as one (k, d, d) array."""
        return np.stack(self.operators)

    @property
    def effects(self) -> np.ndarray:
        """K^dagger K for every operator, shape (k, d, d)."""
        ops = self.stacked
        return np.einsum("kji,kjl->kil", ops.conj(), ops)

    def is_identity(self, tol: float = 1e-12) -> bool:
        return self.process_fidelity() > 1 - tol

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.operators)

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Channel applying self first, then other."""
        return KrausChannel(
            tuple(b @ a for a, b in product(self.operators, other.operators))
        ).canonical()

    def tensor(self, other: "KrausChannel") -> "KrausChannel":
        """self on the high qubit, other on the low qubit."""
        return KrausChannel(
            tuple(np.kron(a, b) for a, b in product(self.operators, other.operators))
        ).canonical()

    def canonical(self, tol: float = 1e-14) -> "KrausChannel":
        """Minimal Kraus set from the eigendecomposition of the Choi matrix."""
        d = self.dim
        vecs = np.stack([k.reshape(-1) for k in self.operators])
        choi = vecs.T @ vecs.conj()
        eigvals, eigvecs = np.linalg.eigh(choi)
        keep = eigvals > tol * max(1.0, float(eigvals.max()))
        ops = tuple(
            np.sqrt(eigvals[i]) * eigvecs[:, i].reshape(d, d) for i in np.flatnonzero(keep)[::-1]
        )
        return KrausChannel(ops)

    def process_fidelity(self) -> float:
        """Entanglement fidelity with the identity, sum |Tr K|^2 / d^2."""
        d = self.dim
        return float(sum(abs(np.trace(k)) ** 2 for k in self.operators) / d**2)

    def average_gate_fidelity(self) -> float:
        d = self.dim
        return (d * self.process_fidelity() + 1) / (d + 1)

    def average_gate_error(self) -> float:
        return 1.0 - self.average_gate_fidelity()


def amplitude_damping(gamma: float) -> KrausChannel:
    """Decay |1> -> |0> with probability gamma."""
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel((k0, k1))


def phase_damping(lam: float) -> KrausChannel:
    """Scale coherences by sqrt(1 - lam)."""
    k0 = np.array([[1, 0], [0, np.sqrt(1 - lam)]], dtype=complex)
    k1 = np.array([[0, 0], [0, np.sqrt(lam)]], dtype=complex)
    return KrausChannel((k0, k1))


def dephasing(factor: float) -> KrausChannel:
    """Multiply off-diagonal elements by factor in [0, 1] (Z mixing)."""
    return KrausChannel(
        (
            np.sqrt((1 + factor) / 2) * _PAULIS[0],
            np.sqrt((1 - factor) / 2) * _PAULIS[3],
        )
    )


def pauli_basis(num_qubits: int) -> list[np.ndarray]:
    """All n-qubit Pauli strings, identity first."""
    return [reduce(np.kron, ps) for ps in product(_PAULIS, repeat=num_qubits)]


def depolarizing(lam: float, num_qubits: int = 1) -> KrausChannel:
    """rho -> (1 - lam) rho + lam I/d."""
    d = 2**num_qubits
    if lam < 0 or lam > d**2 / (d**2 - 1):
        raise InvalidChannelParametersError(f"depolarizing parameter {lam} out of range", lam=lam)
    paulis = pauli_basis(num_qubits)
    ops = [np.sqrt(1 - lam * (d**2 - 1) / d**2) * paulis[0]]
    ops += [np.sqrt(lam / d**2) * p for p in paulis[1:]]
    return KrausChannel(tuple(ops))


def thermal_relaxation_channel(t1_us: float, t2_us: float, duration_ns: float) -> KrausChannel:
    """Amplitude damping toward |0> plus pure dephasing over a duration.

    Populations relax with 1 - exp(-t/T1); coherences decay as exp(-t/T2).

    Args:
        t1_us: Relaxation time (us)
        t2_us: Echo dephasing time (us), at most 2*T1
        duration_ns: Evolution time (ns)

    Returns:
        Single-qubit channel; exactly the identity for zero duration

    Raises:
        InvalidChannelParametersError: If T1 or T2 is not positive, T2 > 2*T1
            or the duration is negative
    """
    if t1_us <= 0 or t2_us <= 0:
        raise InvalidChannelParametersError(
            f"T1 and T2 must be positive (T1={t1_us}, T2={t2_us})", t1=t1_us, t2=t2_us
        )
    if t2_us > 2 * t1_us * (1 + 1e-12):
        raise InvalidChannelParametersError(
            f"T2={t2_us} exceeds 2*T1={2 * t1_us}", t1=t1_us, t2=t2_us
        )
    if duration_ns < 0:
        raise InvalidChannelParametersError(f"negative duration {duration_ns}", duration=duration_ns)
    if duration_ns == 0:
        return KrausChannel.identity()

    t = duration_ns / 1000.0
    gamma = 1.0 - np.exp(-t / t1_us)
    pure_rate = max(0.0, 1.0 / t2_us - 1.0 / (2.0 * t1_us))
    lam = 1.0 - np.exp(-2.0 * t * pure_rate) if pure_rate > 0 else 0.0
    return amplitude_damping(gamma).then(phase_damping(lam))


@dataclass(frozen=True)
class FilledChannel:
    """Relaxation plus the depolarizing part that reaches a target gate error."""

    channel: KrausChannel
    depolarizing_param: float
    relaxation_error: float
    coherence_limited: bool


def depolarizing_fill(gate_error: float, relaxation: KrausChannel) -> FilledChannel:
    """Compose depolarizing noise after relaxation to hit an average gate error.

    Process fidelity is affine in the depolarizing parameter, so
    F(dep o R) = (1 - lam) F(R) + lam / d^2 fixes lam in closed form.

    Args:
        gate_error: Target average gate error
        relaxation: Relaxation channel on d = 2 or 4 dimensions

    Returns:
        The composed channel; lam = 0 with coherence_limited set when the
        relaxation alone already exceeds the target
    """
    d = relaxation.dim
    num_qubits = int(np.log2(d))
    f_relax = relaxation.process_fidelity()
    f_target = ((1.0 - gate_error) * (d + 1) - 1.0) / d
    relaxation_error = relaxation.average_gate_error()
    lam = (f_relax - f_target) / (f_relax - 1.0 / d**2)
    coherence_limited = lam < -1e-12
    if coherence_limited:
        logger.warning(
            f"Relaxation error {relaxation_error:.3e} exceeds gate error {gate_error:.3e}; "
            f"no depolarizing part added"
        )
        lam = 0.0
    lam = max(lam, 0.0)
    if lam == 0.0:
        channel = relaxation
    else:
        channel = relaxation.then(depolarizing(lam, num_qubits))
    return FilledChannel(channel, float(lam), float(relaxation_error), coherence_limited)


def tensor_all(channels: Sequence[KrausChannel]) -> KrausChannel:
    """Tensor product with channels[0] on the highest qubit."""
    return reduce(lambda a, b: a.tensor(b), channels)
