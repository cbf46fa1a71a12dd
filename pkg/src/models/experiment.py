"""Experiment settings models."""

from enum import Enum

from pydantic import BaseModel, Field, field_validator, model_validator


class MqcVariant(str, Enum):
    """Which locally-GHZ-equivalent state the MQC sequence uses."""

    GHZ = "ghz"
    STAR_GRAPH = "star_graph"
    COMPLETE_GRAPH = "complete_graph"


class MitigationMode(str, Enum):
    """Readout correction applied during analysis."""

    NONE = "none"
    FULL = "full"
    TRUNCATED = "truncated"
    TENSORED = "tensored"


class NoiseToggles(BaseModel):
    """Which noise sources the simulation applies."""

    gates: bool = Field(default=True, description="Relaxation and depolarizing after gates")
    idle: bool = Field(default=True, description="Relaxation on idle qubits")
    drift_sigma: float = Field(default=0.0, description="Quasi-static Z drift (rad/ns)", ge=0)
    readout: bool = Field(default=True, description="Device readout errors")

    @property
    def noiseless(self) -> bool:
        return not (self.gates or self.idle or self.readout) and self.drift_sigma == 0


def _default_k_values() -> list[int]:
    return [2**i for i in range(9)]


class ExperimentSpec(BaseModel):
    """Everything needed to reproduce one run."""

    device: str = Field(default="ibmq_system_one", description="Device name or JSON path")
    qubits: list[int] | None = Field(default=None, description="Physical qubits, root first")
    n: int | None = Field(default=None, description="GHZ size for an automatic plan", ge=1)
    root: int | None = Field(default=None, description="Root qubit", ge=0)
    variant: MqcVariant = Field(default=MqcVariant.GHZ, description="Prepared state family")
    refocus: bool = Field(default=False, description="Insert the refocusing pi layer")
    shots: int = Field(default=16384, description="Shots per circuit", ge=1)
    repetitions: int = Field(default=8, description="Independent repetitions", ge=1)
    seed: int = Field(default=0, description="Master seed", ge=0)
    mitigation: MitigationMode = Field(default=MitigationMode.NONE, description="Readout correction")
    truncation_k: int = Field(default=256, description="States in the truncated calibration", ge=1)
    calibration_shots: int = Field(
        default=4096, description="Shots per calibration state; 0 for exact", ge=0
    )
    noise: NoiseToggles = Field(default_factory=NoiseToggles, description="Noise sources")
    exact: bool = Field(default=False, description="Use exact outcome probabilities")
    k_values: list[int] = Field(
        default_factory=_default_k_values, description="Truncation sizes for a mitigation study"
    )

    @field_validator("qubits")
    @classmethod
    def check_qubits(cls, v: list[int] | None) -> list[int] | None:
        if v is None:
            return v
        if not v:
            raise ValueError("qubit list is empty")
        if len(set(v)) != len(v):
            raise ValueError(f"qubit list repeats a qubit: {v}")
        if any(q < 0 for q in v):
            raise ValueError(f"negative qubit index in {v}")
        return v

    @field_validator("k_values")
    @classmethod
    def check_k_values(cls, v: list[int]) -> list[int]:
        if not v or any(k < 1 for k in v):
            raise ValueError("k_values must be positive")
        if v != sorted(v):
            raise ValueError(f"k_values must be ascending, got {v}")
        return v

    @model_validator(mode="after")
    def check_size(self) -> "ExperimentSpec":
        if self.qubits is None and self.n is None:
            raise ValueError("give either qubits or n")
        if self.qubits is not None and self.n is not None and self.n != len(self.qubits):
            raise ValueError(f"n={self.n} disagrees with {len(self.qubits)} qubits")
        if self.qubits is not None and self.root is not None and self.root not in self.qubits:
            raise ValueError(f"root {self.root} is not in {self.qubits}")
        return self

    @property
    def num_qubits(self) -> int:
        return len(self.qubits) if self.qubits is not None else self.n
