"""Entangling plans: CX fan-out trees over device connectivity."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

from src.core.exceptions import DisconnectedSubgraphError, InvalidPlanError
from src.models.device import DeviceModel
from src.simulator.gates import DEFAULT_1Q_NS, DEFAULT_2Q_NS

logger = logging.getLogger(__name__)

Pair = tuple[int, int]


@dataclass(frozen=True)
class EntanglingPlan:
    """Physical qubits to entangle, root first, and the CX moments that reach them.

    Raises:
        InvalidPlanError: If the schedule is not a spanning fan-out tree of
            the qubits or uses a pair the device does not couple
    """

    qubits: tuple[int, ...]
    schedule: tuple[tuple[Pair, ...], ...]
    device: DeviceModel | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(
            self, "schedule", tuple(tuple(tuple(p) for p in m) for m in self.schedule)
        )
        self._validate()

    def _validate(self) -> None:
        if not self.qubits:
            raise InvalidPlanError("plan has no qubits")
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidPlanError(f"repeated qubit in {list(self.qubits)}", qubits=self.qubits)
        members = set(self.qubits)
        reached = {self.root}
        for index, moment in enumerate(self.schedule):
            busy: set[int] = set()
            newly: set[int] = set()
            for control, target in moment:
                if control not in members or target not in members:
                    raise InvalidPlanError(
                        f"CX({control},{target}) leaves the plan qubits", moment=index
                    )
                if control in busy or target in busy:
                    raise InvalidPlanError(
                        f"moment {index} uses a qubit twice", moment=index
                    )
                busy.update((control, target))
                if control not in reached:
                    raise InvalidPlanError(
                        f"CX({control},{target}) fires before {control} is entangled",
                        moment=index,
                    )
                if target in reached or target in newly:
                    raise InvalidPlanError(
                        f"qubit {target} is targeted twice", moment=index, qubit=target
                    )
                if self.device is not None and not self.device.has_edge(control, target):
                    raise InvalidPlanError(
                        f"CX({control},{target}) is not a device edge",
                        control=control,
                        target=target,
                    )
                newly.add(target)
            reached |= newly
        if reached != members:
            raise InvalidPlanError(
                f"qubits {sorted(members - reached)} are never entangled",
                missing=sorted(members - reached),
            )

    @property
    def root(self) -> int:
        return self.qubits[0]

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    @property
    def depth(self) -> int:
        """Number of CX moments."""
        return len(self.schedule)

    def logical(self) -> dict[int, int]:
        """Physical -> logical index map (root is logical 0)."""
        return {q: i for i, q in enumerate(self.qubits)}

    def single_qubit_duration(self, qubit: int) -> float:
        if self.device is None:
            return DEFAULT_1Q_NS
        return self.device.qubit(qubit).gate_duration_1q_ns

    def cx_duration(self, control: int, target: int) -> float:
        if self.device is None:
            return DEFAULT_2Q_NS
        edge = self.device.edge(control, target)
        if edge is None:
            logger.warning(
                f"CX({control},{target}) has no coupler on {self.device.name}; "
                f"using mean duration"
            )
            return self.device.mean_edge_duration
        return edge.duration_ns


def linear_plan(qubits: Sequence[int], device: DeviceModel | None = None) -> EntanglingPlan:
    """Chain plan: each qubit drives the next, one CX per moment."""
    qubits = list(qubits)
    schedule = [((qubits[i], qubits[i + 1]),) for i in range(len(qubits) - 1)]
    return EntanglingPlan(tuple(qubits), tuple(schedule), device)


def _bfs_tree(
    root: int, members: set[int], neighbors
) -> tuple[dict[int, list[int]], list[int]]:
    children: dict[int, list[int]] = {q: [] for q in members}
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for q in frontier:
            for nb in sorted(neighbors(q) & members):
                if nb not in seen:
                    seen.add(nb)
                    children[q].append(nb)
                    nxt.append(nb)
        frontier = nxt
    unreachable = sorted(members - seen)
    return children, unreachable


def auto_plan(device: DeviceModel, qubit_list: Sequence[int]) -> EntanglingPlan:
    """Spanning tree and CX schedule with few moments.

    Builds a breadth-first tree from the first qubit (lower index first),
    then schedules it as a broadcast: a qubit drives one CX per moment, and
    drives its children in order of decreasing remaining subtree time so the
    slowest branch starts first.

    Args:
        device: Device whose couplers the CX gates must use
        qubit_list: Qubits to entangle, root first

    Returns:
        Validated plan

    Raises:
        InvalidPlanError: If a qubit is not on the device
        DisconnectedSubgraphError: If the qubits do not induce a connected subgraph
    """
    qubits = list(qubit_list)
    if not qubits:
        raise InvalidPlanError("no qubits requested")
    for q in qubits:
        if q < 0 or q >= device.num_qubits:
            raise InvalidPlanError(f"qubit {q} is not on {device.name}", qubit=q)
    if len(set(qubits)) != len(qubits):
        raise InvalidPlanError(f"repeated qubit in {qubits}", qubits=qubits)

    root = qubits[0]
    members = set(qubits)
    children, unreachable = _bfs_tree(root, members, device.neighbors)
    if unreachable:
        raise DisconnectedSubgraphError(qubits, unreachable)

    finish: dict[int, int] = {}

    def subtree_time(q: int) -> int:
        for c in children[q]:
            subtree_time(c)
        ordered = sorted(children[q], key=lambda c: (-finish[c], c))
        children[q] = ordered
        finish[q] = max((i + 1 + finish[c] for i, c in enumerate(ordered)), default=0)
        return finish[q]

    depth = subtree_time(root)
    moments: list[list[Pair]] = [[] for _ in range(depth)]

    def assign(q: int, reached_at: int) -> None:
        for i, c in enumerate(children[q]):
            moment = reached_at + i + 1
            moments[moment - 1].append((q, c))
            assign(c, moment)

    assign(root, 0)
    schedule = tuple(tuple(sorted(m)) for m in moments)
    plan = EntanglingPlan(tuple(qubits), schedule, device)
    logger.info(f"Planned {len(qubits)}-qubit GHZ from root {root} in {plan.depth} CX moments")
    return plan
