"""Experiment runner: simulate, persist counts, analyse.

Collection and analysis are separate steps. Analysis is a pure function of
the persisted counts, the readout model and the calibration, which lets
``cmd_replay`` rebuild every derived number from a record directory.
"""

import logging
import time
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from src.analyzer.fidelity import (
    FidelityReport,
    direct_fidelity,
    fidelity_report,
    parity_coherence,
    parity_coherence_with_error,
)
from src.analyzer.observables import (
    excitation_census,
    excitation_histogram,
    parity_expectation,
    populations,
    s_phi,
)
from src.analyzer.spectrum import MqcSpectrum, SweepResult, aggregate_repetitions, mqc_spectrum
from src.circuits.builders import (
    build_mqc_circuit,
    build_parity_circuit,
    build_populations_circuit,
)
from src.circuits.grid import PhiGrid, phi_grid
from src.circuits.plan import EntanglingPlan, auto_plan
from src.core.config import Settings, get_settings
from src.core.exceptions import (
    CircuitError,
    CorruptRecordError,
    InvalidPlanError,
    SimulationSizeError,
    UnsupportedMitigationError,
)
from src.data.device_manager import DeviceManager
from src.mitigation.calibration import (
    CalibrationMatrix,
    build_full_calibration,
    build_truncated_calibration,
    select_truncation_states,
)
from src.mitigation.convergence import convergence_study
from src.mitigation.correction import MitigatedDistribution, mitigate, tensored_mitigate
from src.models.device import DeviceModel
from src.models.experiment import ExperimentSpec, MitigationMode, MqcVariant
from src.noise.density import MAX_DENSITY_QUBITS, oracle_distribution
from src.noise.model import NoiseModel, ReadoutModel, error_budget
from src.noise.trajectories import execute
from src.schemas.response import (
    ConvergenceEntry,
    DeviceReport,
    EdgeBudgetRow,
    HistogramReport,
    ParityReport,
    PopulationRow,
    QubitRow,
    RunRecord,
    SpectrumRow,
    SweepRow,
)
from src.services.record_store import CountsFile, RecordStore
from src.simulator.bitstrings import ones_label, zeros_label
from src.simulator.circuit import Circuit
from src.simulator.seeding import label_id
from src.simulator.statevector import StateVector, apply_circuit

logger = logging.getLogger(__name__)

KIND_GHZ_MQC = "ghz_mqc"
KIND_PARITY = "parity"
KIND_MITIGATION_STUDY = "mitigation_study"

TABLE_MQC = "mqc"
TABLE_PARITY = "parity"
TABLE_POPULATIONS = "populations"

REPLAY_TOL = 1e-12
REPLAY_IGNORED = frozenset({"created_at", "wall_clock_s", "tool_version"})


def canonical_table(table: Mapping[str, float], exact: bool) -> dict[str, float]:
    """Label-sorted copy with plain Python numbers, as persisted."""
    cast = float if exact else int
    return {label: cast(table[label]) for label in sorted(table)}


@dataclass
class CollectedRun:
    """Raw output of the simulation step."""

    kind: str
    spec: ExperimentSpec
    device: DeviceModel
    plan: EntanglingPlan
    readout: ReadoutModel
    tables: list[CountsFile] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.spec.exact


def _grouped(
    tables: Sequence[CountsFile], kind: str, grid_size: int
) -> list[list[dict[str, float]]]:
    """Per repetition, the tables of one kind ordered by grid index."""
    by_rep: dict[int, dict[int, dict[str, float]]] = {}
    for item in tables:
        if item.kind == kind and item.phi_index is not None:
            by_rep.setdefault(item.repetition, {})[item.phi_index] = item.table
    grouped = []
    for rep in sorted(by_rep):
        points = by_rep[rep]
        if sorted(points) != list(range(grid_size)):
            raise CorruptRecordError(
                f"repetition {rep} of {kind} has {len(points)} of {grid_size} grid points",
                kind=kind,
                repetition=rep,
            )
        grouped.append([points[j] for j in range(grid_size)])
    return grouped


def _ordered(tables: Sequence[CountsFile]) -> list[CountsFile]:
    return sorted(
        tables,
        key=lambda t: (t.kind, -1 if t.phi_index is None else t.phi_index, t.repetition),
    )


def _check_parity_mitigation(spec: ExperimentSpec) -> None:
    if spec.mitigation is MitigationMode.TRUNCATED:
        raise UnsupportedMitigationError(
            "A truncated calibration cannot correct parity oscillation data: its "
            "outcomes spread over all basis states. Use full or tensored mitigation.",
            mitigation=spec.mitigation.value,
        )


def _population_tables(tables: Sequence[CountsFile]) -> list[dict[str, float]]:
    items = sorted(
        (t for t in tables if t.kind == TABLE_POPULATIONS), key=lambda t: t.repetition
    )
    return [t.table for t in items]


def prepare_calibration(
    spec: ExperimentSpec,
    readout: ReadoutModel,
    tables: Sequence[CountsFile],
) -> CalibrationMatrix | None:
    """Calibration matrix for full or truncated correction, else None.

    Truncated calibrations rank states over every persisted table and always
    keep all-zeros and all-ones.
    """
    shots = 0 if spec.exact else spec.calibration_shots
    n = readout.num_qubits
    if spec.mitigation is MitigationMode.FULL:
        return build_full_calibration(n, readout, shots, spec.seed)
    if spec.mitigation is MitigationMode.TRUNCATED:
        labels = select_truncation_states(
            [t.table for t in _ordered(tables)], spec.truncation_k, required=[ones_label(n)]
        )
        return build_truncated_calibration(labels, readout, shots, spec.seed)
    return None


class _Corrector:
    """Applies the experiment's mitigation mode to single tables."""

    def __init__(
        self,
        mode: MitigationMode,
        readout: ReadoutModel,
        calibration: CalibrationMatrix | None,
    ) -> None:
        if mode in (MitigationMode.FULL, MitigationMode.TRUNCATED) and calibration is None:
            raise CorruptRecordError(f"{mode.value} mitigation needs a calibration matrix")
        self.mode = mode
        self.readout = readout
        self.calibration = calibration
        self.max_dropped = 0.0

    @property
    def active(self) -> bool:
        return self.mode is not MitigationMode.NONE

    def __call__(self, table: Mapping[str, float]) -> MitigatedDistribution:
        if self.mode is MitigationMode.TENSORED:
            result = tensored_mitigate(table, self.readout)
        else:
            result = mitigate(table, self.calibration)
        self.max_dropped = max(self.max_dropped, result.dropped_mass)
        return result


def _sweep(grid: PhiGrid, values: Sequence[float]) -> SweepResult:
    return SweepResult(grid, np.asarray(values, dtype=float))


def _sweep_rows(raw: SweepResult, mitigated: SweepResult | None) -> list[SweepRow]:
    rows = []
    for j, phi in enumerate(raw.phis):
        rows.append(
            SweepRow(
                phi_index=j,
                phi=float(phi),
                s_raw=float(raw.s_values[j]),
                s_raw_stderr=None if raw.s_stderr is None else float(raw.s_stderr[j]),
                s_mitigated=None if mitigated is None else float(mitigated.s_values[j]),
                s_mitigated_stderr=(
                    None
                    if mitigated is None or mitigated.s_stderr is None
                    else float(mitigated.s_stderr[j])
                ),
            )
        )
    return rows


def _spectrum_rows(raw: MqcSpectrum, mitigated: MqcSpectrum | None) -> list[SpectrumRow]:
    rows = []
    for q in range(-raw.q_max, raw.q_max + 1):
        rows.append(
            SpectrumRow(
                q=q,
                i_raw=raw.intensity(q),
                i_raw_stderr=raw.stderr(q),
                i_mitigated=None if mitigated is None else mitigated.intensity(q),
                i_mitigated_stderr=None if mitigated is None else mitigated.stderr(q),
            )
        )
    return rows


def _mqc_fidelity(
    spectrum: MqcSpectrum,
    per_rep: Sequence[MqcSpectrum],
    pops: Sequence[tuple[float, float]],
    n: int,
) -> FidelityReport:
    direct = None
    if pops:
        direct = [
            direct_fidelity(p0, p1, s.intensity(n))
            for (p0, p1), s in zip(pops, per_rep, strict=True)
        ]
    return fidelity_report(spectrum.intensity(0), spectrum.intensity(n), spectrum.stderr(n), direct)


def _analyze_overlap(
    grouped: list[list[dict[str, float]]],
    grid: PhiGrid,
    extract,
) -> tuple[SweepResult, list[SweepResult]]:
    sweeps = [_sweep(grid, [extract(t) for t in rep]) for rep in grouped]
    return aggregate_repetitions(sweeps), sweeps


def analyze_record(
    kind: str,
    spec: ExperimentSpec,
    device_name: str,
    qubits: Sequence[int],
    schedule: Sequence[Sequence[tuple[int, int]]],
    tables: Sequence[CountsFile],
    readout: ReadoutModel,
    calibration: CalibrationMatrix | None = None,
) -> RunRecord:
    """Every derived quantity of a run, computed from its tables alone.

    Args:
        kind: ghz_mqc, parity or mitigation_study
        spec: Experiment spec of the run
        device_name: Device the run used
        qubits: Physical qubits, root first
        schedule: CX moments of the plan
        tables: Persisted outcome tables
        readout: Readout model over the logical qubits
        calibration: Calibration for full or truncated correction; built
            from the tables when None and the mode needs one

    Returns:
        Run record without timing fields
    """
    n = len(qubits)
    grid = phi_grid(n)
    tables = _ordered(tables)
    if kind == KIND_PARITY:
        _check_parity_mitigation(spec)
    if calibration is None and kind != KIND_MITIGATION_STUDY:
        calibration = prepare_calibration(spec, readout, tables)
    correct = _Corrector(
        spec.mitigation if kind != KIND_MITIGATION_STUDY else MitigationMode.NONE,
        readout,
        calibration,
    )
    record: dict[str, Any] = {
        "kind": kind,
        "spec": spec,
        "device": device_name,
        "qubits": list(qubits),
        "schedule": [list(m) for m in schedule],
        "q_max": grid.q_max,
        "calibration_states": None if calibration is None else calibration.size,
        "tool_version": get_settings().app_version,
    }

    pop_tables = _population_tables(tables)
    raw_pops = [populations(t) for t in pop_tables]
    mit_pops: list[tuple[float, float]] = []
    if correct.active:
        for t in pop_tables:
            dist = correct(t)
            mit_pops.append((dist.probability(zeros_label(n)), dist.probability(ones_label(n))))
    record["populations"] = [
        PopulationRow(
            repetition=r,
            p_allzero=p0,
            p_allone=p1,
            p_allzero_mitigated=mit_pops[r][0] if mit_pops else None,
            p_allone_mitigated=mit_pops[r][1] if mit_pops else None,
        )
        for r, (p0, p1) in enumerate(raw_pops)
    ]

    if kind == KIND_PARITY:
        grouped = _grouped(tables, TABLE_PARITY, len(grid))
        raw, raw_reps = _analyze_overlap(grouped, grid, parity_expectation)
        record["sweep"] = _sweep_rows(raw, None)
        record["parity"] = _parity_report(raw, raw_reps, raw_pops, n, mitigated=False)
        if correct.active:
            mit, mit_reps = _analyze_overlap(
                grouped, grid, lambda t: parity_expectation(correct(t).as_dict())
            )
            record["sweep"] = _sweep_rows(raw, mit)
            record["parity_mitigated"] = _parity_report(mit, mit_reps, mit_pops, n, mitigated=True)
        record["dropped_mass"] = correct.max_dropped if correct.active else None
        return RunRecord(**record)

    grouped = _grouped(tables, TABLE_MQC, len(grid))
    raw, raw_reps = _analyze_overlap(grouped, grid, s_phi)
    raw_spectrum = mqc_spectrum(raw)
    raw_rep_spectra = [mqc_spectrum(s) for s in raw_reps]
    mit = mit_spectrum = None
    if correct.active:
        zeros = zeros_label(n)
        mit, mit_reps = _analyze_overlap(grouped, grid, lambda t: correct(t).probability(zeros))
        mit_spectrum = mqc_spectrum(mit)
        record["fidelity_mitigated"] = _mqc_fidelity(
            mit_spectrum, [mqc_spectrum(s) for s in mit_reps], mit_pops, n
        )
        record["dropped_mass"] = correct.max_dropped
    record["sweep"] = _sweep_rows(raw, mit)
    record["spectrum"] = _spectrum_rows(raw_spectrum, mit_spectrum)
    record["fidelity"] = _mqc_fidelity(raw_spectrum, raw_rep_spectra, raw_pops, n)

    if kind == KIND_MITIGATION_STUDY:
        shots = 0 if spec.exact else spec.calibration_shots
        rows = convergence_study(grouped, grid, n, spec.k_values, readout, shots, spec.seed)
        record["convergence"] = [
            ConvergenceEntry(
                k=r.k,
                num_states=r.num_states,
                full=r.full,
                i_0=r.i_0,
                i_n=r.i_n,
                i_0_stderr=r.i_0_stderr,
                i_n_stderr=r.i_n_stderr,
            )
            for r in rows
        ]
        record["histogram"] = _histogram([t for rep in grouped for t in rep], spec.truncation_k)
    return RunRecord(**record)


def _parity_report(
    aggregate: SweepResult,
    per_rep: Sequence[SweepResult],
    pops: Sequence[tuple[float, float]],
    n: int,
    mitigated: bool,
) -> ParityReport:
    coherence, coherence_err = parity_coherence_with_error(aggregate, n)
    p0 = float(np.mean([p[0] for p in pops]))
    p1 = float(np.mean([p[1] for p in pops]))
    samples = np.array(
        [0.5 * (a + b + parity_coherence(s, n)) for (a, b), s in zip(pops, per_rep, strict=True)]
    )
    stderr = float(samples.std(ddof=1) / np.sqrt(len(samples))) if len(samples) > 1 else None
    return ParityReport(
        coherence=coherence,
        coherence_stderr=coherence_err,
        p_allzero=p0,
        p_allone=p1,
        fidelity=float(samples.mean()),
        fidelity_stderr=stderr,
        mitigated=mitigated,
    )


def _histogram(tables: Sequence[Mapping[str, float]], top_k: int) -> HistogramReport:
    weights: dict[str, float] = {}
    for table in tables:
        total = float(sum(table.values()))
        for label, value in table.items():
            weights[label] = weights.get(label, 0.0) + value / total
    ranked = sorted(weights.values(), reverse=True)
    return HistogramReport(
        top_k=top_k,
        all_states=excitation_histogram(weights).tolist(),
        top_states=excitation_histogram(weights, top_k).tolist(),
        top_state_excitations=excitation_census(weights, top_k).tolist(),
        top_k_weight=float(sum(ranked[:top_k]) / sum(ranked)),
    )


class ExperimentRunner:
    """Runs experiment specs against simulated devices."""

    def __init__(
        self,
        device_manager: DeviceManager | None = None,
        settings: Settings | None = None,
    ) -> None:
        """Initialize runner.

        Args:
            device_manager: Source of device configs
            settings: Application settings
        """
        self.settings = settings or get_settings()
        self.device_manager = device_manager or DeviceManager()

    def load_device(self, name: str) -> DeviceModel:
        return self.device_manager.get_device(name)

    def plan_for(self, spec: ExperimentSpec, device: DeviceModel) -> EntanglingPlan:
        """Entangling plan over the experiment's qubits, or an automatic choice of N qubits.

        Raises:
            InvalidPlanError: If the qubits cannot be entangled on the device
        """
        if spec.qubits is not None:
            qubits = list(spec.qubits)
            if spec.root is not None:
                qubits.remove(spec.root)
                qubits.insert(0, spec.root)
        else:
            try:
                qubits = device.entangling_qubits(spec.n, spec.root)
            except ValueError as e:
                raise InvalidPlanError(str(e), n=spec.n, root=spec.root) from e
        return auto_plan(device, qubits)

    @staticmethod
    def noise_for(spec: ExperimentSpec, device: DeviceModel) -> NoiseModel:
        toggles = spec.noise
        return NoiseModel.from_device(
            device,
            gates=toggles.gates,
            idle=toggles.idle,
            drift_sigma=toggles.drift_sigma,
            readout=toggles.readout,
        )

    @staticmethod
    def readout_for(spec: ExperimentSpec, device: DeviceModel, plan: EntanglingPlan) -> ReadoutModel:
        if spec.noise.readout:
            return ReadoutModel.from_device(device, plan.qubits)
        return ReadoutModel.ideal(plan.num_qubits)

    def _outcomes(
        self,
        circuit: Circuit,
        noise: NoiseModel,
        spec: ExperimentSpec,
        stream: tuple[int, ...],
    ) -> dict[str, float]:
        if spec.exact:
            if noise.is_noiseless(circuit):
                state = apply_circuit(StateVector.zero(circuit.num_qubits), circuit)
                return state.distribution()
            if circuit.num_qubits > MAX_DENSITY_QUBITS:
                raise SimulationSizeError(circuit.num_qubits, MAX_DENSITY_QUBITS)
            return oracle_distribution(circuit, noise)
        return execute(circuit, noise, spec.shots, spec.seed, stream)

    def _run_family(
        self,
        run: CollectedRun,
        noise: NoiseModel,
        table_kind: str,
        circuits: Sequence[Circuit],
        repetitions: int,
        indexed: bool = True,
    ) -> None:
        tag = label_id(table_kind)
        for rep in range(repetitions):
            for j, circuit in enumerate(circuits):
                phi_index = j if indexed else None
                stream = (tag, rep) if phi_index is None else (tag, phi_index, rep)
                table = self._outcomes(circuit, noise, run.spec, stream)
                run.tables.append(
                    CountsFile(
                        kind=table_kind,
                        phi_index=phi_index,
                        repetition=rep,
                        table=canonical_table(table, run.exact),
                        exact=run.exact,
                    )
                )
            logger.debug(f"Finished {table_kind} repetition {rep + 1}/{repetitions}")

    def collect(self, kind: str, spec: ExperimentSpec) -> CollectedRun:
        """Simulate every circuit the experiment needs.

        Exact runs use a single repetition.

        Raises:
            UnsupportedMitigationError: For truncated correction of parity data
            CircuitError: For parity runs on a graph-state variant
        """
        if kind == KIND_PARITY:
            _check_parity_mitigation(spec)
            if spec.variant is not MqcVariant.GHZ:
                raise CircuitError(
                    f"parity oscillations need the ghz variant, got {spec.variant.value}",
                    variant=spec.variant.value,
                )

        device = self.load_device(spec.device)
        plan = self.plan_for(spec, device)
        noise = self.noise_for(spec, device)
        run = CollectedRun(kind, spec, device, plan, self.readout_for(spec, device, plan))
        grid = phi_grid(plan.num_qubits)
        repetitions = 1 if spec.exact else spec.repetitions
        logger.info(
            f"Running {kind} on {device.name} qubits {list(plan.qubits)}: "
            f"{len(grid)} angles x {repetitions} repetitions"
            + (" (exact)" if spec.exact else f" x {spec.shots} shots")
        )

        if kind == KIND_PARITY:
            circuits = [build_parity_circuit(plan, phi) for phi in grid.angles]
            self._run_family(run, noise, TABLE_PARITY, circuits, repetitions)
        else:
            circuits = [
                build_mqc_circuit(plan, phi, spec.refocus, spec.variant) for phi in grid.angles
            ]
            self._run_family(run, noise, TABLE_MQC, circuits, repetitions)
        if kind != KIND_MITIGATION_STUDY and spec.variant is MqcVariant.GHZ:
            self._run_family(
                run,
                noise,
                TABLE_POPULATIONS,
                [build_populations_circuit(plan)],
                repetitions,
                indexed=False,
            )
        return run

    def run(self, kind: str, spec: ExperimentSpec, output: Path | None = None) -> RunRecord:
        """Collect, analyse and optionally persist one experiment."""
        started = time.perf_counter()
        run = self.collect(kind, spec)
        calibration = None
        if kind != KIND_MITIGATION_STUDY:
            calibration = prepare_calibration(spec, run.readout, run.tables)
        record = analyze_record(
            kind,
            spec,
            run.device.name,
            run.plan.qubits,
            run.plan.schedule,
            run.tables,
            run.readout,
            calibration,
        )
        record.created_at = datetime.now(timezone.utc)
        record.wall_clock_s = time.perf_counter() - started
        if output is not None:
            self.persist(Path(output), run, record, calibration)
        logger.info(f"Finished {kind} in {record.wall_clock_s:.2f}s")
        return record

    @staticmethod
    def persist(
        output: Path,
        run: CollectedRun,
        record: RunRecord,
        calibration: CalibrationMatrix | None,
    ) -> None:
        store = RecordStore(output)
        for item in run.tables:
            store.write_counts(item)
        store.write_confusion(run.readout)
        if calibration is not None:
            store.write_calibration(calibration)
        store.write_results(record)
        store.write_sweep_csv(record.sweep)
        store.write_spectrum_csv(record.spectrum)
        store.write_manifest()

    def device_report(self, name: str) -> DeviceReport:
        device = self.load_device(name)
        return DeviceReport(
            name=device.name,
            num_qubits=device.num_qubits,
            qubits=[
                QubitRow(
                    index=q.index,
                    frequency_ghz=q.frequency_ghz,
                    t1_us=q.t1_us,
                    t2_us=q.t2_us,
                    readout_fidelity=q.readout_fidelity,
                )
                for q in device.qubits
            ],
            edges=[EdgeBudgetRow(**vars(row)) for row in error_budget(device)],
        )


def numeric_mismatches(
    stored: Any, replayed: Any, tol: float = REPLAY_TOL, path: str = ""
) -> list[str]:
    """Paths where two JSON-like trees differ, numbers compared within tol."""
    if isinstance(stored, dict) and isinstance(replayed, dict):
        problems = []
        for key in sorted(set(stored) | set(replayed)):
            if key in REPLAY_IGNORED:
                continue
            if key not in stored or key not in replayed:
                problems.append(f"{path}.{key}")
                continue
            problems.extend(numeric_mismatches(stored[key], replayed[key], tol, f"{path}.{key}"))
        return problems
    if isinstance(stored, list) and isinstance(replayed, list):
        if len(stored) != len(replayed):
            return [f"{path}[len]"]
        problems = []
        for i, (a, b) in enumerate(zip(stored, replayed, strict=True)):
            problems.extend(numeric_mismatches(a, b, tol, f"{path}[{i}]"))
        return problems
    numeric = (int, float)
    if (
        isinstance(stored, numeric)
        and isinstance(replayed, numeric)
        and not isinstance(stored, bool)
        and not isinstance(replayed, bool)
    ):
        return [] if abs(stored - replayed) <= tol else [path]
    return [] if stored == replayed else [path]


@dataclass
class ReplayResult:
    """Outcome of re-analysing a record directory."""

    record: RunRecord
    stored: RunRecord
    mismatches: list[str]
    mitigation_override: bool

    @property
    def matches(self) -> bool:
        return not self.mismatches


def _runner(runner: ExperimentRunner | None) -> ExperimentRunner:
    return runner or ExperimentRunner()


def cmd_ghz_mqc(
    spec: ExperimentSpec, output: Path | None = None, runner: ExperimentRunner | None = None
) -> RunRecord:
    """GHZ MQC sweep: S_phi table, spectrum and fidelity report."""
    return _runner(runner).run(KIND_GHZ_MQC, spec, output)


def cmd_parity(
    spec: ExperimentSpec, output: Path | None = None, runner: ExperimentRunner | None = None
) -> RunRecord:
    """Parity oscillation sweep, coherence C and F = (P0 + P1 + C) / 2."""
    return _runner(runner).run(KIND_PARITY, spec, output)


def cmd_mitigation_study(
    spec: ExperimentSpec, output: Path | None = None, runner: ExperimentRunner | None = None
) -> RunRecord:
    """Corrected I_0 and I_N against calibration size, plus excitation histograms."""
    return _runner(runner).run(KIND_MITIGATION_STUDY, spec, output)


def cmd_device_report(name: str, runner: ExperimentRunner | None = None) -> DeviceReport:
    return _runner(runner).device_report(name)


def cmd_replay(path: Path, mitigation: MitigationMode | None = None) -> ReplayResult:
    """Recompute every derived output from a record's persisted files.

    With a different mitigation mode the calibration is rebuilt from the
    stored readout model and counts, and differences from the stored results
    are reported rather than raised.

    Raises:
        CorruptRecordError: If files are missing, modified or malformed, or
            a same-mode replay diverges from the stored results
    """
    store = RecordStore(Path(path))
    store.verify_manifest()
    stored = store.read_results()
    tables = store.load_counts()
    readout = store.read_confusion()
    if readout is None:
        raise CorruptRecordError(f"{path} has no readout model", path=str(path))

    override = mitigation is not None and mitigation is not stored.spec.mitigation
    spec = stored.spec
    calibration = None
    if override:
        spec = spec.model_copy(update={"mitigation": mitigation})
    else:
        calibration = store.read_calibration()
        if spec.mitigation in (MitigationMode.FULL, MitigationMode.TRUNCATED) and calibration is None:
            raise CorruptRecordError(f"{path} is missing its calibration matrix", path=str(path))

    record = analyze_record(
        stored.kind,
        spec,
        stored.device,
        stored.qubits,
        [[tuple(pair) for pair in moment] for moment in stored.schedule],
        tables,
        readout,
        calibration,
    )
    mismatches = numeric_mismatches(
        stored.model_dump(mode="json", exclude={"spec"}),
        record.model_dump(mode="json", exclude={"spec"}),
    )
    if mismatches and not override:
        raise CorruptRecordError(
            f"replay diverges from stored results at {len(mismatches)} fields",
            fields=mismatches[:20],
        )
    if override:
        logger.info(
            f"Replayed with {mitigation.value} mitigation: {len(mismatches)} fields differ"
        )
    return ReplayResult(record, stored, mismatches, override)
