"""Gate definitions and their unitaries."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from src.core.exceptions import CircuitError, NonUnitaryGateError

UNITARY_TOL = 1e-10

DEFAULT_1Q_NS = 50.0
DEFAULT_2Q_NS = 400.0

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=complex,
)


class GateKind(Enum):
    """Supported gate types."""

    H = "h"
    X = "x"
    CX = "cx"
    RZ = "rz"
    RXY = "rxy"
    U1Q = "u1q"


def rz_matrix(theta: float) -> np.ndarray:
    """Z rotation diag(e^{i theta/2}, e^{-i theta/2})."""
    return np.diag([np.exp(0.5j * theta), np.exp(-0.5j * theta)])


def rxy_matrix(theta: float, axis_angle: float) -> np.ndarray:
    """exp(-i theta/2 (cos(a) X + sin(a) Y))."""
    n_dot_sigma = np.cos(axis_angle) * _X + np.sin(axis_angle) * _Y
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * n_dot_sigma


def rx_matrix(theta: float) -> np.ndarray:
    return rxy_matrix(theta, 0.0)


@dataclass(frozen=True, eq=False)
class Gate:
    """A gate on specific qubits.

    Two-qubit matrices treat the first listed qubit as the high bit, so CX
    lists (control, target).
    """

    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    unitary: np.ndarray | None = field(default=None, repr=False)
    duration: float = DEFAULT_1Q_NS

    def __post_init__(self) -> None:
        arity = 2 if self.kind is GateKind.CX else 1
        if len(self.qubits) != arity:
            raise CircuitError(
                f"{self.kind.name} takes {arity} qubit(s), got {self.qubits}",
                qubits=list(self.qubits),
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit in {self.qubits}", qubits=list(self.qubits))
        if self.kind is GateKind.U1Q:
            if self.unitary is None or self.unitary.shape != (2, 2):
                raise CircuitError("U1Q needs a 2x2 matrix")
            deviation = float(
                np.max(np.abs(self.unitary.conj().T @ self.unitary - np.eye(2)))
            )
            if deviation > UNITARY_TOL:
                raise NonUnitaryGateError(deviation)

    @classmethod
    def h(cls, q: int, duration: float = DEFAULT_1Q_NS) -> "Gate":
        return cls(GateKind.H, (q,), duration=duration)

    @classmethod
    def x(cls, q: int, duration: float = DEFAULT_1Q_NS) -> "Gate":
        return cls(GateKind.X, (q,), duration=duration)

    @classmethod
    def cx(cls, control: int, target: int, duration: float = DEFAULT_2Q_NS) -> "Gate":
        return cls(GateKind.CX, (control, target), duration=duration)

    @classmethod
    def rz(cls, q: int, theta: float) -> "Gate":
        # Virtual Z: a frame change with no duration.
        return cls(GateKind.RZ, (q,), params=(theta,), duration=0.0)

    @classmethod
    def rxy(
        cls, q: int, theta: float, axis_angle: float, duration: float = DEFAULT_1Q_NS
    ) -> "Gate":
        return cls(GateKind.RXY, (q,), params=(theta, axis_angle), duration=duration)

    @classmethod
    def u1q(cls, q: int, matrix: np.ndarray, duration: float = DEFAULT_1Q_NS) -> "Gate":
        return cls(GateKind.U1Q, (q,), unitary=np.asarray(matrix, dtype=complex), duration=duration)

    @property
    def matrix(self) -> np.ndarray:
        """Unitary of the gate in the (qubits[0], ...) high-to-low basis."""
        match self.kind:
            case GateKind.H:
                return _H
            case GateKind.X:
                return _X
            case GateKind.CX:
                return _CX
            case GateKind.RZ:
                return rz_matrix(self.params[0])
            case GateKind.RXY:
                return rxy_matrix(*self.params)
            case GateKind.U1Q:
                assert self.unitary is not None
                return self.unitary
        raise CircuitError(f"unknown gate kind {self.kind}")

    @property
    def is_diagonal(self) -> bool:
        return self.kind is GateKind.RZ

    def dagger(self) -> "Gate":
        """Inverse gate with the same duration."""
        match self.kind:
            case GateKind.H | GateKind.X | GateKind.CX:
                return self
            case GateKind.RZ:
                return Gate.rz(self.qubits[0], -self.params[0])
            case GateKind.RXY:
                theta, axis = self.params
                return Gate.rxy(self.qubits[0], -theta, axis, duration=self.duration)
            case _:
                return Gate.u1q(self.qubits[0], self.matrix.conj().T, duration=self.duration)

    def on(self, mapping: dict[int, int]) -> "Gate":
        """Same gate relabelled through a qubit mapping."""
        return Gate(
            self.kind,
            tuple(mapping[q] for q in self.qubits),
            self.params,
            self.unitary,
            self.duration,
        )
