"""Device models: qubit parameters, couplers and connectivity."""

from collections.abc import Iterable

from pydantic import BaseModel, Field, PrivateAttr, field_validator, model_validator


class QubitProperties(BaseModel):
    """Calibration data for one physical qubit."""

    index: int = Field(..., description="Physical qubit index", ge=0)
    frequency_ghz: float = Field(..., description="Qubit frequency (GHz)", gt=0)
    t1_us: float = Field(..., description="Energy relaxation time T1 (us)", gt=0)
    t2_us: float = Field(..., description="Echo dephasing time T2 (us)", gt=0)
    readout_fidelity: float = Field(..., description="Assignment fidelity", gt=0, le=1)
    gate_error_1q: float = Field(default=5e-4, description="Single-qubit gate error", ge=0, lt=1)
    gate_duration_1q_ns: float = Field(default=50.0, description="Single-qubit gate time (ns)", ge=0)

    @model_validator(mode="after")
    def check_t2_bound(self) -> "QubitProperties":
        if self.t2_us > 2 * self.t1_us:
            raise ValueError(
                f"qubit {self.index}: T2={self.t2_us} exceeds 2*T1={2 * self.t1_us}"
            )
        return self

    @property
    def readout_error(self) -> float:
        """Symmetric bit-flip probability at readout."""
        return 1.0 - self.readout_fidelity


class EdgeProperties(BaseModel):
    """Calibration data for one coupler."""

    qubits: tuple[int, int] = Field(..., description="Connected qubit pair")
    gate_error: float = Field(..., description="Two-qubit gate error", ge=0, lt=1)
    duration_ns: float = Field(default=400.0, description="CX duration (ns)", ge=0)

    @field_validator("qubits")
    @classmethod
    def check_distinct(cls, v: tuple[int, int]) -> tuple[int, int]:
        if v[0] == v[1]:
            raise ValueError(f"self-loop edge {v}")
        return v

    @property
    def key(self) -> frozenset[int]:
        return frozenset(self.qubits)


class DeviceModel(BaseModel):
    """Connectivity and noise parameters of a device."""

    name: str = Field(..., description="Device name")
    description: str = Field(default="", description="Free-form notes")
    num_qubits: int = Field(..., description="Number of physical qubits", ge=1)
    qubits: list[QubitProperties] = Field(..., description="Per-qubit parameters")
    edges: list[EdgeProperties] = Field(default_factory=list, description="Couplers")
    entangling_order: list[int] = Field(
        default_factory=list,
        description="Published entangling order; the first N entries form the N-qubit path",
    )
    default_root: int | None = Field(default=None, description="Root qubit for auto plans")

    _adjacency: dict[int, set[int]] = PrivateAttr(default_factory=dict)
    _edge_index: dict[frozenset[int], EdgeProperties] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def check_graph(self) -> "DeviceModel":
        indices = [q.index for q in self.qubits]
        if sorted(indices) != list(range(self.num_qubits)):
            raise ValueError(f"qubit indices must be 0..{self.num_qubits - 1}, got {indices}")
        self.qubits = sorted(self.qubits, key=lambda q: q.index)

        seen: set[frozenset[int]] = set()
        for edge in self.edges:
            for q in edge.qubits:
                if q >= self.num_qubits:
                    raise ValueError(f"edge {edge.qubits} references missing qubit {q}")
            if edge.key in seen:
                raise ValueError(f"duplicate edge {edge.qubits}")
            seen.add(edge.key)

        for q in self.entangling_order:
            if q >= self.num_qubits:
                raise ValueError(f"entangling order references missing qubit {q}")
        if len(set(self.entangling_order)) != len(self.entangling_order):
            raise ValueError("entangling order repeats a qubit")
        if self.default_root is not None and self.default_root >= self.num_qubits:
            raise ValueError(f"default root {self.default_root} does not exist")
        return self

    def model_post_init(self, __context: object) -> None:
        self._adjacency = {i: set() for i in range(self.num_qubits)}
        self._edge_index = {}
        for edge in self.edges:
            a, b = edge.qubits
            self._edge_index[edge.key] = edge
            self._adjacency.setdefault(a, set()).add(b)
            self._adjacency.setdefault(b, set()).add(a)

    def qubit(self, index: int) -> QubitProperties:
        return self.qubits[index]

    def neighbors(self, index: int) -> set[int]:
        return self._adjacency[index]

    def has_edge(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self._edge_index

    def edge(self, a: int, b: int) -> EdgeProperties | None:
        return self._edge_index.get(frozenset((a, b)))

    @property
    def root(self) -> int:
        """Root used for auto plans when none is given."""
        if self.default_root is not None:
            return self.default_root
        if self.entangling_order:
            return self.entangling_order[0]
        return 0

    @property
    def mean_edge_error(self) -> float:
        if not self.edges:
            return 0.0
        return sum(e.gate_error for e in self.edges) / len(self.edges)

    @property
    def mean_edge_duration(self) -> float:
        if not self.edges:
            return 400.0
        return sum(e.duration_ns for e in self.edges) / len(self.edges)

    def entangling_qubits(self, n: int, root: int | None = None) -> list[int]:
        """Physical qubits used for an n-qubit GHZ state.

        Uses the published entangling order when it is long enough and starts
        at the requested root, otherwise breadth-first discovery from the root
        with ascending tie-break.

        Args:
            n: Number of qubits to entangle
            root: Root qubit; defaults to the device root

        Returns:
            Qubit list, root first

        Raises:
            ValueError: If n exceeds the device size or the root's component
        """
        if n < 1 or n > self.num_qubits:
            raise ValueError(f"cannot entangle {n} qubits on a {self.num_qubits}-qubit device")
        start = self.root if root is None else root
        if not 0 <= start < self.num_qubits:
            raise ValueError(f"root {start} is not on {self.name}")
        order_fits = self.entangling_order and self.entangling_order[0] == start
        if order_fits and len(self.entangling_order) >= n:
            return list(self.entangling_order[:n])

        order = [start]
        seen = {start}
        frontier = [start]
        while frontier and len(order) < n:
            nxt: list[int] = []
            for q in frontier:
                for nb in sorted(self._adjacency[q]):
                    if nb not in seen:
                        seen.add(nb)
                        order.append(nb)
                        nxt.append(nb)
            frontier = nxt
        if len(order) < n:
            raise ValueError(f"root {start} reaches only {len(order)} qubits")
        return order[:n]

    @classmethod
    def uniform(
        cls,
        num_qubits: int,
        edges: Iterable[tuple[int, int]],
        *,
        t1_us: float = 70.0,
        t2_us: float = 76.0,
        readout_fidelity: float = 1.0,
        gate_error_1q: float = 0.0,
        gate_error_2q: float = 0.0,
        duration_1q_ns: float = 50.0,
        duration_2q_ns: float = 400.0,
        name: str = "uniform",
    ) -> "DeviceModel":
        """Build a device where every qubit and coupler shares parameters."""
        qubits = [
            QubitProperties(
                index=i,
                frequency_ghz=5.0,
                t1_us=t1_us,
                t2_us=t2_us,
                readout_fidelity=readout_fidelity,
                gate_error_1q=gate_error_1q,
                gate_duration_1q_ns=duration_1q_ns,
            )
            for i in range(num_qubits)
        ]
        edge_models = [
            EdgeProperties(qubits=e, gate_error=gate_error_2q, duration_ns=duration_2q_ns)
            for e in edges
        ]
        return cls(name=name, num_qubits=num_qubits, qubits=qubits, edges=edge_models)
