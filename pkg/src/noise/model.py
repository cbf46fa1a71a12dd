"""Device noise model: gate channels, idle relaxation, drift and readout."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from src.core.exceptions import CalibrationError, CircuitError
from src.models.device import DeviceModel
from src.noise.channels import (
    FilledChannel,
    KrausChannel,
    depolarizing_fill,
    tensor_all,
    thermal_relaxation_channel,
)
from src.simulator.circuit import Circuit
from src.simulator.gates import Gate, GateKind

logger = logging.getLogger(__name__)

FULL_CONFUSION_MAX_QUBITS = 10


@dataclass
class ReadoutModel:
    """Readout confusion over the measured qubits.

    ``confusion[j]`` is [[p(0|0), p(0|1)], [p(1|0), p(1|1)]] for qubit j:
    columns are the prepared value. ``full`` optionally replaces the
    product form with a correlated (2**n, 2**n) matrix in the same
    orientation.
    """

    confusion: np.ndarray
    full: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.confusion = np.asarray(self.confusion, dtype=float)
        if self.confusion.ndim != 3 or self.confusion.shape[1:] != (2, 2):
            raise CalibrationError(f"confusion must have shape (n, 2, 2), got {self.confusion.shape}")
        _check_stochastic(self.confusion, axis=1)
        if self.full is not None:
            if self.num_qubits > FULL_CONFUSION_MAX_QUBITS:
                raise CalibrationError(
                    f"full confusion supports at most {FULL_CONFUSION_MAX_QUBITS} qubits"
                )
            self.full = np.asarray(self.full, dtype=float)
            if self.full.shape != (2**self.num_qubits,) * 2:
                raise CalibrationError(f"full confusion has shape {self.full.shape}")
            _check_stochastic(self.full, axis=0)

    @property
    def num_qubits(self) -> int:
        return self.confusion.shape[0]

    @classmethod
    def from_flip_probabilities(
        cls, p10: Sequence[float], p01: Sequence[float] | None = None
    ) -> "ReadoutModel":
        """Per-qubit model from p(1|0) and p(0|1); symmetric when p01 is omitted."""
        p10 = np.asarray(p10, dtype=float)
        p01 = p10 if p01 is None else np.asarray(p01, dtype=float)
        confusion = np.stack(
            [np.array([[1 - a, b], [a, 1 - b]]) for a, b in zip(p10, p01, strict=True)]
        )
        return cls(confusion)

    @classmethod
    def ideal(cls, num_qubits: int) -> "ReadoutModel":
        return cls(np.stack([np.eye(2)] * num_qubits))

    @classmethod
    def from_device(cls, device: DeviceModel, layout: Sequence[int]) -> "ReadoutModel":
        """Symmetric flips of 1 - readout_fidelity for each physical qubit."""
        return cls.from_flip_probabilities([device.qubit(q).readout_error for q in layout])

    @property
    def is_ideal(self) -> bool:
        identity = np.eye(2)
        if self.full is not None:
            return bool(np.allclose(self.full, np.eye(self.full.shape[0]), atol=0))
        return bool(all(np.array_equal(c, identity) for c in self.confusion))

    def matrix(self) -> np.ndarray:
        """Full (2**n, 2**n) confusion, little-endian index."""
        if self.full is not None:
            return self.full
        if self.num_qubits > FULL_CONFUSION_MAX_QUBITS:
            raise CalibrationError(
                f"refusing to materialise a {self.num_qubits}-qubit confusion matrix"
            )
        return reduce(np.kron, list(self.confusion[::-1]))

    def marginal(self) -> "ReadoutModel":
        """Product-form model with the single-qubit marginals of ``full``."""
        if self.full is None:
            return ReadoutModel(self.confusion.copy())
        n = self.num_qubits
        indices = np.arange(2**n)
        confusion = []
        for j in range(n):
            bits = (indices >> j) & 1
            block = np.zeros((2, 2))
            for prepared in (0, 1):
                cols = self.full[:, bits == prepared].mean(axis=1)
                block[0, prepared] = cols[bits == 0].sum()
                block[1, prepared] = cols[bits == 1].sum()
            confusion.append(block)
        return ReadoutModel(np.stack(confusion))


def _check_stochastic(matrix: np.ndarray, axis: int) -> None:
    if np.any(matrix < -1e-12) or np.any(matrix > 1 + 1e-12):
        raise CalibrationError("confusion entries must lie in [0, 1]")
    sums = matrix.sum(axis=axis)
    if not np.allclose(sums, 1.0, atol=1e-9):
        raise CalibrationError("confusion columns must sum to 1")


@dataclass(frozen=True)
class EdgeBudget:
    """Split of one coupler's error into relaxation and depolarizing parts."""

    qubits: tuple[int, int]
    gate_error: float
    coherence_limit: float
    depolarizing_param: float
    coherence_limited: bool


@dataclass
class NoiseModel:
    """Noise sources applied during trajectory and oracle simulation.

    Args:
        device: Parameters for gate and idle channels and device readout
        gates: Relaxation plus depolarizing fill after every timed gate
        idle: Relaxation on qubits without a gate for the moment duration
        drift_sigma: Std-dev of the per-shot Z drift rate (rad/ns)
        readout: Explicit readout model over the circuit's logical qubits
        device_readout: Use the device's readout fidelities when no explicit
            model is given
    """

    device: DeviceModel | None = None
    gates: bool = False
    idle: bool = False
    drift_sigma: float = 0.0
    readout: ReadoutModel | None = None
    device_readout: bool = False
    _cache: dict = field(default_factory=dict, init=False, repr=False)
    _warned_edges: set = field(default_factory=set, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.drift_sigma < 0:
            raise ValueError(f"drift sigma must be >= 0, got {self.drift_sigma}")
        if (self.gates or self.idle or self.device_readout) and self.device is None:
            raise ValueError("gate, idle and device readout noise need a device")

    @classmethod
    def ideal(cls) -> "NoiseModel":
        return cls()

    @classmethod
    def from_device(
        cls,
        device: DeviceModel,
        *,
        gates: bool = True,
        idle: bool = True,
        drift_sigma: float = 0.0,
        readout: bool = True,
    ) -> "NoiseModel":
        """The basic device model: relaxation filled to the benchmarked gate errors."""
        return cls(
            device=device,
            gates=gates,
            idle=idle,
            drift_sigma=drift_sigma,
            device_readout=readout,
        )

    def readout_for(self, circuit: Circuit) -> ReadoutModel | None:
        """Readout model over the circuit's logical qubits, or None when perfect."""
        if self.readout is not None:
            if self.readout.num_qubits != circuit.num_qubits:
                raise CircuitError(
                    f"readout covers {self.readout.num_qubits} qubits, "
                    f"circuit has {circuit.num_qubits}"
                )
            return None if self.readout.is_ideal else self.readout
        if self.device_readout:
            model = ReadoutModel.from_device(self.device, circuit.layout)
            return None if model.is_ideal else model
        return None

    def is_noiseless(self, circuit: Circuit) -> bool:
        return (
            not self.gates
            and not self.idle
            and self.drift_sigma == 0
            and self.readout_for(circuit) is None
        )

    def relaxation(self, physical: int, duration_ns: float) -> KrausChannel:
        key = ("relax", physical, duration_ns)
        if key not in self._cache:
            q = self.device.qubit(physical)
            self._cache[key] = thermal_relaxation_channel(q.t1_us, q.t2_us, duration_ns)
        return self._cache[key]

    def idle_channel(self, physical: int, duration_ns: float) -> KrausChannel | None:
        if not self.idle or duration_ns <= 0:
            return None
        channel = self.relaxation(physical, duration_ns)
        return None if channel.is_identity() else channel

    def _edge_error(self, a: int, b: int) -> float:
        edge = self.device.edge(a, b)
        if edge is not None:
            return edge.gate_error
        if (a, b) not in self._warned_edges:
            self._warned_edges.add((a, b))
            logger.warning(
                f"CX({a},{b}) has no coupler on {self.device.name}; using mean edge error"
            )
        return self.device.mean_edge_error

    def filled(self, gate: Gate, layout: Sequence[int]) -> FilledChannel | None:
        """Relaxation-plus-depolarizing channel for one gate, cached per physical site."""
        if gate.kind is GateKind.RZ or gate.duration <= 0:
            return None
        physical = tuple(layout[q] for q in gate.qubits)
        key = ("gate", gate.kind is GateKind.CX, physical, gate.duration)
        if key not in self._cache:
            relax = tensor_all([self.relaxation(p, gate.duration) for p in physical])
            if gate.kind is GateKind.CX:
                error = self._edge_error(*physical)
            else:
                error = self.device.qubit(physical[0]).gate_error_1q
            self._cache[key] = depolarizing_fill(error, relax)
        return self._cache[key]

    def gate_channel(self, gate: Gate, layout: Sequence[int]) -> KrausChannel | None:
        """Channel applied right after a gate, or None when it is the identity."""
        if not self.gates:
            return None
        filled = self.filled(gate, layout)
        if filled is None or filled.channel.is_identity():
            return None
        return filled.channel

    def error_budget(self) -> list[EdgeBudget]:
        """Coherence-limited and depolarizing parts of every coupler's error."""
        if self.device is None:
            return []
        rows = []
        for edge in self.device.edges:
            gate = Gate.cx(edge.qubits[0], edge.qubits[1], edge.duration_ns)
            filled = self.filled(gate, range(self.device.num_qubits))
            rows.append(
                EdgeBudget(
                    qubits=edge.qubits,
                    gate_error=edge.gate_error,
                    coherence_limit=filled.relaxation_error,
                    depolarizing_param=filled.depolarizing_param,
                    coherence_limited=filled.coherence_limited,
                )
            )
        return rows


def error_budget(device: DeviceModel) -> list[EdgeBudget]:
    """Per-coupler split of the two-qubit error into coherence limit and depolarizing part."""
    return NoiseModel.from_device(device).error_budget()
