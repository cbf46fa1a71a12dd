"""Domain exceptions.

Every error keeps the offending values as attributes and exposes a stable
``error_code`` used by the CLI error JSON and the HTTP layer.
"""

from typing import Any


class MqcError(Exception):
    """Base class for all toolkit errors."""

    error_code = "mqc_error"

    def __init__(self, message: str, **details: Any) -> None:
        self.details = details
        super().__init__(message)

    def to_dict(self) -> dict[str, Any]:
        """Machine-readable form of the error."""
        return {
            "error": self.error_code,
            "message": str(self),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in value]
    return str(value)


class DeviceNotFoundError(MqcError):
    """Raised when a device config is not found."""

    error_code = "device_not_found"

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Device not found: {name}", name=name)


class QubitIndexError(MqcError):
    """Raised when a gate or query references a qubit outside the register."""

    error_code = "qubit_index"

    def __init__(self, qubit: int, num_qubits: int) -> None:
        self.qubit = qubit
        self.num_qubits = num_qubits
        super().__init__(
            f"Qubit index {qubit} out of range for {num_qubits} qubits",
            qubit=qubit,
            num_qubits=num_qubits,
        )


class NonUnitaryGateError(MqcError):
    """Raised when a U1Q matrix is not unitary."""

    error_code = "non_unitary_gate"

    def __init__(self, deviation: float) -> None:
        self.deviation = deviation
        super().__init__(f"Matrix is not unitary (deviation {deviation:.3e})", deviation=deviation)


class CircuitError(MqcError):
    """Raised for malformed circuits or dimension mismatches."""

    error_code = "circuit"


class SimulationSizeError(MqcError):
    """Raised when a register exceeds the dense simulation cap."""

    error_code = "simulation_size"

    def __init__(self, num_qubits: int, limit: int) -> None:
        self.num_qubits = num_qubits
        self.limit = limit
        super().__init__(
            f"{num_qubits} qubits exceeds the limit of {limit}",
            num_qubits=num_qubits,
            limit=limit,
        )


class InvalidPlanError(MqcError):
    """Raised when an entangling plan is not a valid fan-out tree."""

    error_code = "invalid_plan"


class DisconnectedSubgraphError(InvalidPlanError):
    """Raised when the requested qubits do not induce a connected subgraph."""

    error_code = "disconnected_subgraph"

    def __init__(self, qubits: list[int], unreachable: list[int]) -> None:
        self.qubits = qubits
        self.unreachable = unreachable
        super().__init__(
            f"Qubits {unreachable} are not connected to root {qubits[0]}",
            qubits=qubits,
            unreachable=unreachable,
        )


class IncompleteChannelError(MqcError):
    """Raised when Kraus operators do not sum to the identity."""

    error_code = "incomplete_channel"

    def __init__(self, deviation: float) -> None:
        self.deviation = deviation
        super().__init__(
            f"Kraus operators are not complete (deviation {deviation:.3e})", deviation=deviation
        )


class InvalidChannelParametersError(MqcError):
    """Raised for physically impossible relaxation parameters."""

    error_code = "invalid_channel_parameters"


class GridMismatchError(MqcError):
    """Raised when sweep data does not match its phase grid."""

    error_code = "grid_mismatch"


class EmptyCountsError(MqcError):
    """Raised when a counts table holds no shots."""

    error_code = "empty_counts"

    def __init__(self) -> None:
        super().__init__("Counts table is empty")


class CalibrationError(MqcError):
    """Raised for malformed calibration inputs."""

    error_code = "calibration"


class SingularCalibrationError(CalibrationError):
    """Raised when a per-qubit confusion matrix cannot be inverted."""

    error_code = "singular_calibration"

    def __init__(self, qubit: int, determinant: float) -> None:
        self.qubit = qubit
        self.determinant = determinant
        super().__init__(
            f"Confusion matrix of qubit {qubit} is singular (det={determinant:.3e})",
            qubit=qubit,
            determinant=determinant,
        )


class UnsupportedMitigationError(MqcError):
    """Raised when a mitigation mode cannot serve an experiment."""

    error_code = "unsupported_mitigation"


class CorruptRecordError(MqcError):
    """Raised when a persisted run record is missing files or fails checks."""

    error_code = "corrupt_record"
