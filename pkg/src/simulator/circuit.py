"""Time-sliced circuits."""

from collections.abc import Iterable, Sequence

from src.core.exceptions import CircuitError, QubitIndexError
from src.simulator.gates import Gate


class Circuit:
    """Ordered moments of gates on disjoint qubits.

    ``append`` packs a gate into the earliest moment after the last use of
    its qubits; ``add_moment`` opens a new moment and nothing appended later
    moves in front of it. ``layout`` maps logical qubit j to the physical
    device qubit it runs on.
    """

    def __init__(
        self,
        num_qubits: int,
        measured_qubits: Sequence[int] | None = None,
        layout: Sequence[int] | None = None,
    ) -> None:
        if num_qubits < 1:
            raise CircuitError(f"circuit needs at least one qubit, got {num_qubits}")
        self.num_qubits = num_qubits
        self._moments: list[list[Gate]] = []
        self._frontier = [0] * num_qubits
        self._floor = 0
        self.measured_qubits = (
            list(measured_qubits) if measured_qubits is not None else list(range(num_qubits))
        )
        self.layout = tuple(layout) if layout is not None else tuple(range(num_qubits))
        if len(self.layout) != num_qubits:
            raise CircuitError(f"layout {self.layout} does not cover {num_qubits} qubits")
        for q in self.measured_qubits:
            self._check_index(q)

    def _check_index(self, q: int) -> None:
        if q < 0 or q >= self.num_qubits:
            raise QubitIndexError(q, self.num_qubits)

    @property
    def moments(self) -> tuple[tuple[Gate, ...], ...]:
        return tuple(tuple(m) for m in self._moments)

    @property
    def depth(self) -> int:
        return len(self._moments)

    def append(self, gate: Gate) -> "Circuit":
        """Place a gate as early as its qubits allow."""
        for q in gate.qubits:
            self._check_index(q)
        index = max([self._floor] + [self._frontier[q] for q in gate.qubits])
        if index == len(self._moments):
            self._moments.append([])
        self._moments[index].append(gate)
        for q in gate.qubits:
            self._frontier[q] = index + 1
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for gate in gates:
            self.append(gate)
        return self

    def add_moment(self, gates: Iterable[Gate]) -> "Circuit":
        """Append a new moment holding exactly these gates."""
        gates = list(gates)
        used: set[int] = set()
        for gate in gates:
            for q in gate.qubits:
                self._check_index(q)
                if q in used:
                    raise CircuitError(f"qubit {q} appears twice in one moment", qubit=q)
                used.add(q)
        self._moments.append(gates)
        index = len(self._moments)
        self._floor = index
        for q in used:
            self._frontier[q] = index
        return self

    def barrier(self) -> "Circuit":
        """Keep later gates out of existing moments."""
        self._floor = len(self._moments)
        return self

    def moment_duration(self, index: int) -> float:
        return max((g.duration for g in self._moments[index]), default=0.0)

    def gates(self) -> Iterable[Gate]:
        for moment in self._moments:
            yield from moment

    def count(self, kind) -> int:
        return sum(1 for g in self.gates() if g.kind is kind)

    def __repr__(self) -> str:
        return f"Circuit(num_qubits={self.num_qubits}, depth={self.depth})"
