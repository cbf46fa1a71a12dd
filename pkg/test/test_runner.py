"""Tests for the experiment runner, record store and replay."""

import json

import numpy as np
import pytest
from src.core.exceptions import CircuitError, CorruptRecordError, UnsupportedMitigationError
from src.models.device import DeviceModel
from src.models.experiment import ExperimentSpec, MitigationMode, MqcVariant, NoiseToggles
from src.services.experiment_runner import (
    ExperimentRunner,
    cmd_device_report,
    cmd_ghz_mqc,
    cmd_mitigation_study,
    cmd_parity,
    cmd_replay,
    numeric_mismatches,
)
from src.services.record_store import CountsFile, RecordStore

NOISELESS = NoiseToggles(gates=False, idle=False, readout=False)


def _i(record, q: int) -> float:
    return next(row.i_raw for row in record.spectrum if row.q == q)


def _i_stderr(record, q: int) -> float:
    return next(row.i_raw_stderr for row in record.spectrum if row.q == q)


@pytest.fixture
def runner(device_manager) -> ExperimentRunner:
    """Runner over the bundled devices."""
    return ExperimentRunner(device_manager)


@pytest.fixture
def small_spec() -> ExperimentSpec:
    """Cheap noisy 3-qubit spec with full mitigation."""
    return ExperimentSpec(
        n=3,
        shots=512,
        repetitions=2,
        seed=11,
        mitigation=MitigationMode.FULL,
        calibration_shots=1024,
    )


class TestGhzMqc:
    """Test cases for the GHZ MQC experiment."""

    def test_exact_noiseless(self, runner: ExperimentRunner):
        """Test an exact noiseless N=4 run saturates every fidelity estimate."""
        spec = ExperimentSpec(n=4, exact=True, noise=NOISELESS)
        record = cmd_ghz_mqc(spec, runner=runner)
        assert record.kind == "ghz_mqc"
        assert record.qubits == [5, 10, 6, 11]
        assert record.q_max == 5
        assert len(record.sweep) == 10
        assert len(record.spectrum) == 11
        assert _i(record, 0) == pytest.approx(0.5, abs=1e-12)
        assert _i(record, 4) == pytest.approx(0.25, abs=1e-12)
        assert _i(record, -4) == pytest.approx(0.25, abs=1e-12)
        assert record.fidelity.lower == pytest.approx(1.0, abs=1e-9)
        assert record.fidelity.upper == pytest.approx(1.0, abs=1e-9)
        assert record.fidelity.direct == pytest.approx(1.0, abs=1e-9)
        assert record.populations[0].p_allzero == pytest.approx(0.5)
        assert record.fidelity_mitigated is None

    def test_explicit_qubits_and_root(self, runner: ExperimentRunner):
        """Test a given qubit list is reordered to start at the root."""
        spec = ExperimentSpec(qubits=[0, 5, 10], root=5, exact=True, noise=NOISELESS)
        record = cmd_ghz_mqc(spec, runner=runner)
        assert record.qubits == [5, 0, 10]
        assert record.fidelity.lower == pytest.approx(1.0, abs=1e-9)

    def test_sampled_run_is_seeded(self, runner: ExperimentRunner, small_spec: ExperimentSpec):
        """Test equal seeds give equal records and another seed differs."""
        first = cmd_ghz_mqc(small_spec, runner=runner)
        second = cmd_ghz_mqc(small_spec, runner=runner)
        other = cmd_ghz_mqc(small_spec.model_copy(update={"seed": 12}), runner=runner)
        assert [r.s_raw for r in first.sweep] == [r.s_raw for r in second.sweep]
        assert [r.s_raw for r in first.sweep] != [r.s_raw for r in other.sweep]

    def test_mitigation_reported(self, runner: ExperimentRunner, small_spec: ExperimentSpec):
        """Test corrected sweeps, spectra and fidelity sit beside the raw ones."""
        record = cmd_ghz_mqc(small_spec, runner=runner)
        assert record.calibration_states == 8
        assert record.fidelity_mitigated is not None
        assert all(row.s_mitigated is not None for row in record.sweep)
        assert all(row.i_mitigated is not None for row in record.spectrum)
        assert record.populations[0].p_allzero_mitigated is not None
        assert record.fidelity_mitigated.lower >= record.fidelity.lower - 0.05

    def test_graph_variant_skips_populations(self, runner: ExperimentRunner):
        """Test graph-state variants report bounds without a direct fidelity."""
        spec = ExperimentSpec(
            n=3, exact=True, noise=NOISELESS, variant=MqcVariant.COMPLETE_GRAPH
        )
        record = cmd_ghz_mqc(spec, runner=runner)
        assert record.populations == []
        assert record.fidelity.direct is None
        assert record.fidelity.lower == pytest.approx(1.0, abs=1e-9)

    def test_sampled_ten_qubit_spectrum(self, runner: ExperimentRunner):
        """Test N=10 at 16384 x 8 shots keeps I_10 within 3 stderr of 0.25."""
        spec = ExperimentSpec(n=10, seed=3, noise=NOISELESS)
        record = cmd_ghz_mqc(spec, runner=runner)
        stderr = _i_stderr(record, 10)
        assert stderr < 0.01
        assert abs(_i(record, 10) - 0.25) <= 3 * stderr


class TestParity:
    """Test cases for the parity oscillation experiment."""

    def test_exact_noiseless(self, runner: ExperimentRunner):
        """Test the ideal 3-qubit GHZ gives C = 1 and F = 1."""
        record = cmd_parity(ExperimentSpec(n=3, exact=True, noise=NOISELESS), runner=runner)
        assert record.kind == "parity"
        assert record.parity.coherence == pytest.approx(1.0, abs=1e-9)
        assert record.parity.fidelity == pytest.approx(1.0, abs=1e-9)
        assert record.spectrum == []

    def test_truncated_mitigation_rejected(self, runner: ExperimentRunner):
        """Test truncated calibrations cannot serve parity data."""
        spec = ExperimentSpec(n=3, mitigation=MitigationMode.TRUNCATED)
        with pytest.raises(UnsupportedMitigationError):
            cmd_parity(spec, runner=runner)

    def test_graph_variant_rejected(self, runner: ExperimentRunner):
        """Test parity needs the GHZ variant."""
        with pytest.raises(CircuitError):
            cmd_parity(ExperimentSpec(n=3, variant=MqcVariant.STAR_GRAPH), runner=runner)

    def test_noisy_with_tensored_mitigation(self, runner: ExperimentRunner):
        """Test noisy coherence drops below one and correction is reported."""
        spec = ExperimentSpec(
            n=3, shots=1024, repetitions=2, seed=5, mitigation=MitigationMode.TENSORED
        )
        record = cmd_parity(spec, runner=runner)
        assert record.parity.coherence < 1.0
        assert record.parity_mitigated is not None
        assert record.parity_mitigated.mitigated
        assert record.calibration_states is None


class TestMitigationStudy:
    """Test cases for the calibration-size study."""

    def test_rows_and_histogram(self, runner: ExperimentRunner):
        """Test one row per K plus the full matrix, and an excitation histogram."""
        spec = ExperimentSpec(
            n=3, shots=512, repetitions=2, seed=2, k_values=[1, 2, 4], truncation_k=4
        )
        record = cmd_mitigation_study(spec, runner=runner)
        assert record.kind == "mitigation_study"
        assert [row.k for row in record.convergence] == [1, 2, 4, 8]
        assert record.convergence[-1].full
        assert record.populations == []
        histogram = record.histogram
        assert len(histogram.all_states) == 4
        assert sum(histogram.all_states) == pytest.approx(1.0)
        assert 0 < histogram.top_k_weight <= 1
        assert len(histogram.top_state_excitations) == 4
        assert sum(histogram.top_state_excitations) == pytest.approx(1.0)
        assert int(np.argmax(histogram.all_states)) <= 1
        assert histogram.top_states[0] + histogram.top_states[1] > 0.8


class TestDeviceReport:
    """Test cases for the device report."""

    def test_bundled_device(self, runner: ExperimentRunner):
        """Test qubit rows and one budget row per coupler."""
        report = cmd_device_report("ibmq_system_one", runner=runner)
        assert report.num_qubits == 20
        assert len(report.qubits) == 20
        assert len(report.edges) == 23
        assert all(row.depolarizing_param >= 0 for row in report.edges)


class TestRecordStore:
    """Test cases for record persistence."""

    def test_counts_file_layout(self, tmp_path):
        """Test the header line and sorted bitstring lines."""
        store = RecordStore(tmp_path)
        store.write_counts(CountsFile("mqc", 3, 1, {"01": 2, "00": 5}, exact=False))
        path = tmp_path / "counts" / "mqc_phi003_rep01.txt"
        assert path.read_text().splitlines() == [
            "# kind=mqc phi_index=3 repetition=1 shots=7",
            "00 5",
            "01 2",
        ]
        loaded = store.read_counts(path)
        assert loaded.table == {"00": 5, "01": 2}
        assert loaded.phi_index == 3

    def test_shot_total_checked(self, tmp_path):
        """Test a counts file whose total disagrees with its header is corrupt."""
        path = tmp_path / "bad.txt"
        path.write_text("# kind=mqc phi_index=0 repetition=0 shots=10\n00 4\n")
        with pytest.raises(CorruptRecordError):
            RecordStore(tmp_path).read_counts(path)

    def test_persisted_files(self, runner: ExperimentRunner, small_spec: ExperimentSpec, tmp_path):
        """Test a run writes counts, calibration, reports and a manifest."""
        record = cmd_ghz_mqc(small_spec, tmp_path, runner=runner)
        assert (tmp_path / "calibration" / "matrix.csv").exists()
        assert (tmp_path / "calibration" / "confusion.json").exists()
        assert (tmp_path / "sweep.csv").read_text().startswith("phi_index,phi,s_raw")
        counts = sorted((tmp_path / "counts").glob("*.txt"))
        assert len(counts) == 2 * (8 + 1)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert "results.json" in manifest["files"]
        assert RecordStore(tmp_path).read_results() == record


class TestReplay:
    """Test cases for recomputing results from a record."""

    def test_replay_matches_sampled_run(
        self, runner: ExperimentRunner, small_spec: ExperimentSpec, tmp_path
    ):
        """Test replay reproduces every stored number of a mitigated run."""
        cmd_ghz_mqc(small_spec, tmp_path, runner=runner)
        result = cmd_replay(tmp_path)
        assert result.matches
        assert not result.mitigation_override

    def test_replay_matches_exact_run(self, runner: ExperimentRunner, tmp_path):
        """Test exact probability tables replay bit for bit."""
        spec = ExperimentSpec(n=3, exact=True, mitigation=MitigationMode.TENSORED)
        cmd_parity(spec, tmp_path, runner=runner)
        assert cmd_replay(tmp_path).matches

    def test_replay_matches_mitigation_study(self, runner: ExperimentRunner, tmp_path):
        """Test the convergence study is rebuilt from the stored seed."""
        spec = ExperimentSpec(n=3, shots=256, repetitions=2, k_values=[2, 4], truncation_k=4)
        cmd_mitigation_study(spec, tmp_path, runner=runner)
        assert cmd_replay(tmp_path).matches

    def test_mitigation_override(self, runner: ExperimentRunner, small_spec, tmp_path):
        """Test a different mode is reported rather than raised."""
        cmd_ghz_mqc(small_spec, tmp_path, runner=runner)
        result = cmd_replay(tmp_path, MitigationMode.TENSORED)
        assert result.mitigation_override
        assert result.record.spec.mitigation is MitigationMode.TENSORED
        assert result.stored.spec.mitigation is MitigationMode.FULL

    def test_tampered_counts(self, runner: ExperimentRunner, small_spec, tmp_path):
        """Test an edited counts file fails the manifest check."""
        cmd_ghz_mqc(small_spec, tmp_path, runner=runner)
        path = sorted((tmp_path / "counts").glob("*.txt"))[0]
        path.write_text(path.read_text() + "\n")
        with pytest.raises(CorruptRecordError):
            cmd_replay(tmp_path)

    def test_extra_and_missing_files(self, runner: ExperimentRunner, small_spec, tmp_path):
        """Test unlisted files and a missing manifest are corrupt records."""
        cmd_ghz_mqc(small_spec, tmp_path, runner=runner)
        (tmp_path / "notes.txt").write_text("extra")
        with pytest.raises(CorruptRecordError):
            cmd_replay(tmp_path)
        (tmp_path / "manifest.json").unlink()
        with pytest.raises(CorruptRecordError):
            cmd_replay(tmp_path)

    def test_diverging_results(self, runner: ExperimentRunner, small_spec, tmp_path):
        """Test edited results with a refreshed manifest still fail replay."""
        record = cmd_ghz_mqc(small_spec, tmp_path, runner=runner)
        record.sweep[0].s_raw += 0.01
        store = RecordStore(tmp_path)
        store.write_results(record)
        store.write_manifest()
        with pytest.raises(CorruptRecordError) as exc_info:
            cmd_replay(tmp_path)
        assert ".sweep[0].s_raw" in exc_info.value.details["fields"]

    def test_numeric_mismatches(self):
        """Test tolerance, ignored keys and structural differences."""
        stored = {"a": 1.0, "b": [1, 2], "created_at": "x", "c": "ghz"}
        assert numeric_mismatches(stored, {**stored, "a": 1.0 + 1e-13, "created_at": "y"}) == []
        assert numeric_mismatches(stored, {**stored, "b": [1]}) == [".b[len]"]
        assert numeric_mismatches(stored, {**stored, "c": "parity"}) == [".c"]


@pytest.mark.slow
class TestPhysicsTrends:
    """End-to-end checks of drift refocusing and size scaling."""

    @pytest.fixture
    def chain_path(self, tmp_path):
        """Eight-qubit chain with no gate error, saved as a device file."""
        device = DeviceModel.uniform(8, [(i, i + 1) for i in range(7)], name="drift_chain")
        path = tmp_path / "drift_chain.json"
        path.write_text(device.model_dump_json(), encoding="utf-8")
        return str(path)

    def _direct(self, runner, chain_path: str, drift: float, refocus: bool):
        spec = ExperimentSpec(
            device=chain_path,
            n=8,
            shots=4096,
            repetitions=8,
            seed=21,
            refocus=refocus,
            noise=NOISELESS.model_copy(update={"drift_sigma": drift}),
        )
        report = cmd_ghz_mqc(spec, runner=runner).fidelity
        return report.direct, report.direct_stderr

    def test_refocusing_recovers_drift(self, runner: ExperimentRunner, chain_path: str):
        """Test the pi layer lifts the drift-limited fidelity well beyond the error bars."""
        plain, plain_err = self._direct(runner, chain_path, 1e-4, refocus=False)
        echoed, echoed_err = self._direct(runner, chain_path, 1e-4, refocus=True)
        assert 0.65 < plain < 0.95
        assert echoed - plain >= 5 * np.hypot(plain_err, echoed_err)

    def test_no_drift_no_gain(self, runner: ExperimentRunner, chain_path: str):
        """Test without drift the refocused run agrees with the plain one."""
        plain, plain_err = self._direct(runner, chain_path, 0.0, refocus=False)
        echoed, echoed_err = self._direct(runner, chain_path, 0.0, refocus=True)
        assert abs(echoed - plain) <= 2 * np.hypot(plain_err, echoed_err) + 1e-12

    def test_lower_bound_falls_with_size(
        self, runner: ExperimentRunner, device: DeviceModel, tmp_path
    ):
        """Test the lower bound decreases strictly from N=4 to N=12 at median parameters."""
        median = DeviceModel.uniform(
            12,
            [(i, i + 1) for i in range(11)],
            t1_us=float(np.median([q.t1_us for q in device.qubits])),
            t2_us=float(np.median([q.t2_us for q in device.qubits])),
            readout_fidelity=float(np.median([q.readout_fidelity for q in device.qubits])),
            gate_error_1q=float(np.median([q.gate_error_1q for q in device.qubits])),
            gate_error_2q=float(np.median([e.gate_error for e in device.edges])),
            name="median_chain",
        )
        path = tmp_path / "median_chain.json"
        path.write_text(median.model_dump_json(), encoding="utf-8")
        lower = []
        for n in (4, 6, 8, 10, 12):
            spec = ExperimentSpec(device=str(path), n=n, shots=2048, repetitions=1, seed=4)
            lower.append(cmd_ghz_mqc(spec, runner=runner).fidelity.lower)
        assert all(b < a for a, b in zip(lower, lower[1:], strict=False))
        assert lower[-1] > 0
