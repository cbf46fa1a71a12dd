"""Report and record schemas.

These are the documented layouts of results.json and the HTTP responses.
"""

from datetime import datetime

from pydantic import BaseModel, Field

from src.analyzer.fidelity import FidelityReport
from src.models.experiment import ExperimentSpec


class SweepRow(BaseModel):
    """One grid angle of an overlap or parity sweep."""

    phi_index: int = Field(..., description="Grid index j", ge=0)
    phi: float = Field(..., description="Angle pi*j/q_max")
    s_raw: float = Field(..., description="Mean measured value")
    s_raw_stderr: float | None = Field(default=None, description="Standard error over repetitions")
    s_mitigated: float | None = Field(default=None, description="Readout-corrected mean")
    s_mitigated_stderr: float | None = Field(default=None, description="Corrected standard error")


class SpectrumRow(BaseModel):
    """One MQC intensity, mirrored over negative q."""

    q: int = Field(..., description="Coherence order")
    i_raw: float = Field(..., description="I_q from raw counts")
    i_raw_stderr: float | None = Field(default=None, description="Propagated standard error")
    i_mitigated: float | None = Field(default=None, description="I_q after readout correction")
    i_mitigated_stderr: float | None = Field(default=None, description="Corrected standard error")


class PopulationRow(BaseModel):
    """All-zeros and all-ones populations of one repetition."""

    repetition: int = Field(..., ge=0)
    p_allzero: float
    p_allone: float
    p_allzero_mitigated: float | None = None
    p_allone_mitigated: float | None = None


class ParityReport(BaseModel):
    """Parity-oscillation coherence and the fidelity it implies."""

    coherence: float = Field(..., description="C = 2|rho corner|")
    coherence_stderr: float | None = Field(default=None)
    p_allzero: float = Field(..., description="Mean P(0...0)")
    p_allone: float = Field(..., description="Mean P(1...1)")
    fidelity: float = Field(..., description="(P0 + P1 + C) / 2")
    fidelity_stderr: float | None = Field(default=None)
    mitigated: bool = Field(default=False, description="Computed from corrected counts")


class ConvergenceEntry(BaseModel):
    """Corrected intensities at one calibration size."""

    k: int = Field(..., description="Requested number of calibration states", ge=1)
    num_states: int = Field(..., description="States actually calibrated", ge=1)
    full: bool = Field(default=False, description="Full 2^N calibration")
    i_0: float
    i_n: float
    i_0_stderr: float | None = None
    i_n_stderr: float | None = None


class HistogramReport(BaseModel):
    """Excitation-number weight of the measured states."""

    top_k: int = Field(..., description="States in the truncated histogram", ge=1)
    all_states: list[float] = Field(..., description="Normalised weight per excitation number")
    top_states: list[float] = Field(..., description="Same, over the top-k states only")
    top_state_excitations: list[float] = Field(
        default_factory=list, description="Share of the top-k states per excitation number"
    )
    top_k_weight: float = Field(..., description="Share of total weight in the top-k states")


class EdgeBudgetRow(BaseModel):
    """Error split of one coupler."""

    qubits: tuple[int, int]
    gate_error: float
    coherence_limit: float
    depolarizing_param: float
    coherence_limited: bool


class QubitRow(BaseModel):
    index: int
    frequency_ghz: float
    t1_us: float
    t2_us: float
    readout_fidelity: float


class DeviceReport(BaseModel):
    """Per-qubit parameters and coupler error budget."""

    name: str
    num_qubits: int
    qubits: list[QubitRow]
    edges: list[EdgeBudgetRow]


class RunRecord(BaseModel):
    """Everything derived from one run's persisted counts."""

    kind: str = Field(..., description="ghz_mqc, parity or mitigation_study")
    spec: ExperimentSpec = Field(..., description="Snapshot of the experiment spec")
    device: str = Field(..., description="Device name")
    qubits: list[int] = Field(..., description="Physical qubits, root first")
    schedule: list[list[tuple[int, int]]] = Field(..., description="CX moments of the plan")
    q_max: int = Field(..., description="Grid half-size")
    sweep: list[SweepRow] = Field(default_factory=list)
    spectrum: list[SpectrumRow] = Field(default_factory=list)
    populations: list[PopulationRow] = Field(default_factory=list)
    fidelity: FidelityReport | None = Field(default=None, description="From raw counts")
    fidelity_mitigated: FidelityReport | None = Field(
        default=None, description="From readout-corrected counts"
    )
    parity: ParityReport | None = None
    parity_mitigated: ParityReport | None = None
    convergence: list[ConvergenceEntry] | None = None
    histogram: HistogramReport | None = None
    calibration_states: int | None = Field(default=None, description="Calibration size used")
    dropped_mass: float | None = Field(
        default=None, description="Largest measured mass outside the calibration set"
    )
    tool_version: str = Field(..., description="Version of the toolkit")
    created_at: datetime | None = Field(default=None)
    wall_clock_s: float | None = Field(default=None, description="Run time in seconds")


class SpectrumResponse(BaseModel):
    """Spectrum and fidelity bounds of a submitted sweep."""

    q_max: int
    spectrum: list[SpectrumRow]
    fidelity: FidelityReport
