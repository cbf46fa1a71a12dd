"""Tests for observables, MQC spectra, fidelity bounds and parity coherence."""

import numpy as np
import pytest
from src.analyzer.fidelity import (
    direct_fidelity,
    fidelity_bounds,
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
from src.analyzer.spectrum import (
    SweepResult,
    aggregate_repetitions,
    exact_overlap_signal,
    mqc_spectrum,
)
from src.circuits.builders import build_ghz_prep, build_mqc_circuit, build_parity_circuit
from src.circuits.grid import PhiGrid, phi_grid
from src.circuits.plan import auto_plan
from src.core.exceptions import EmptyCountsError, GridMismatchError
from src.mitigation.calibration import build_full_calibration
from src.models.device import DeviceModel
from src.noise.density import DensityMatrix, density_oracle, mqc_decompose, oracle_distribution
from src.noise.model import NoiseModel, ReadoutModel
from src.noise.trajectories import execute
from src.simulator.bitstrings import popcount, to_label
from src.simulator.circuit import Circuit
from src.simulator.gates import Gate, rxy_matrix
from src.simulator.kernels import conjugate
from src.simulator.statevector import StateVector, apply_circuit


@pytest.fixture(scope="module")
def lossy_device() -> DeviceModel:
    """Six-qubit chain with gate and relaxation noise and perfect readout."""
    return DeviceModel.uniform(
        6,
        [(i, i + 1) for i in range(5)],
        gate_error_1q=0.002,
        gate_error_2q=0.03,
        name="lossy_chain",
    )


def _ideal_sweep(n: int, shift: float = 0.0) -> SweepResult:
    grid = phi_grid(n)
    return SweepResult(grid, 0.5 * (1 + np.cos(n * grid.angles + shift)))


def _random_density(rng: np.random.Generator, n: int) -> DensityMatrix:
    dim = 2**n
    rank = int(rng.integers(1, dim + 1))
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return DensityMatrix(n, rho / np.trace(rho).real)


def _align_corner(rho: DensityMatrix) -> DensityMatrix:
    """Collective Z rotation making the corner element real and non-negative."""
    n = rho.num_qubits
    alpha = -np.angle(rho.corner) / n
    phases = np.exp(1j * alpha * popcount(np.arange(2**n)))
    return DensityMatrix(n, phases[:, None] * rho.matrix * phases.conj()[None, :])


def _random_noisy_circuit(rng: np.random.Generator, n: int) -> Circuit:
    circuit = Circuit(n)
    for _ in range(int(rng.integers(4, 12))):
        q = int(rng.integers(n))
        circuit.append(Gate.rxy(q, *rng.uniform(0, 2 * np.pi, 2)))
        if n > 1 and q < n - 1 and rng.random() < 0.6:
            circuit.append(Gate.cx(q, q + 1))
    return circuit


def _exact_parity_sweep(rho: DensityMatrix) -> SweepResult:
    n = rho.num_qubits
    grid = phi_grid(n)
    signs = 1 - 2 * (popcount(np.arange(2**n)) % 2)
    values = []
    for phi in grid.angles:
        rotated = rho.matrix
        for q in range(n):
            rotated = conjugate(rotated, rxy_matrix(-np.pi / 2, phi), (q,), n)
        values.append(float(np.sum(signs * np.diag(rotated).real)))
    return SweepResult(grid, np.array(values))


class TestObservables:
    """Test cases for single-table observables."""

    def test_s_phi(self):
        """Test the all-zeros fraction."""
        assert s_phi({"0000": 50, "0001": 50}) == 0.5
        assert s_phi({"1111": 100}) == 0.0

    def test_s_phi_accepts_probabilities(self):
        """Test exact tables of probabilities work the same."""
        assert s_phi({"00": 0.25, "11": 0.75}) == pytest.approx(0.25)

    def test_empty_counts(self):
        """Test empty or zero-total tables raise EmptyCountsError."""
        with pytest.raises(EmptyCountsError):
            s_phi({})
        with pytest.raises(EmptyCountsError):
            s_phi({"00": 0})

    def test_populations(self):
        """Test P(0...0) and P(1...1)."""
        assert populations({"000": 40, "111": 30, "010": 30}) == pytest.approx((0.4, 0.3))

    def test_parity_expectation(self):
        """Test even weights count +1 and odd weights -1."""
        assert parity_expectation({"00": 3, "11": 1}) == 1.0
        assert parity_expectation({"00": 1, "01": 1}) == 0.0

    def test_excitation_histogram(self):
        """Test weights per excitation number and top-k truncation."""
        counts = {"0000": 50, "1111": 50}
        np.testing.assert_allclose(excitation_histogram(counts), [0.5, 0, 0, 0, 0.5])
        np.testing.assert_allclose(excitation_histogram(counts, top_k=1), [1, 0, 0, 0, 0])

    def test_excitation_census(self):
        """Test each top-k state counts once whatever its weight."""
        counts = {"000": 70, "001": 20, "011": 6, "111": 4}
        np.testing.assert_allclose(excitation_census(counts, 4), [0.25, 0.25, 0.25, 0.25])
        np.testing.assert_allclose(excitation_census(counts, 2), [0.5, 0.5, 0, 0])
        with pytest.raises(EmptyCountsError):
            excitation_census({}, 3)

    def test_top_states_center_on_three_excitations(self, line_plan):
        """Test the 256 heaviest N=10 MQC outcomes under 3% readout error peak at three."""
        n = 10
        plan = line_plan(n)
        confusion = build_full_calibration(n, ReadoutModel.from_flip_probabilities([0.03] * n))
        ideal = [
            apply_circuit(StateVector.zero(n), build_mqc_circuit(plan, phi)).probabilities()
            for phi in phi_grid(n).angles
        ]
        measured = confusion.matrix @ np.sum(ideal, axis=0)
        weights = {to_label(k, n): float(w) for k, w in enumerate(measured)}
        census = excitation_census(weights, 256)
        assert int(np.argmax(census)) == 3
        assert census[3] > census[4] > census[2]
        assert excitation_histogram(weights, 256).argmax() <= 1

    def test_noiseless_sweep_signal(self, ghz_plan):
        """Test sampled N=4 S_phi follows (1 + cos 4 phi)/2 within shot noise."""
        plan = ghz_plan(4)
        shots = 16384
        for j, phi in enumerate(phi_grid(4).angles):
            counts = execute(build_mqc_circuit(plan, phi), NoiseModel.ideal(), shots, 3, (j,))
            ideal = 0.5 * (1 + np.cos(4 * phi))
            sigma = np.sqrt(ideal * (1 - ideal) / shots)
            assert abs(s_phi(counts) - ideal) <= 4 * sigma + 1e-12


class TestSweepResult:
    """Test cases for sweep containers and repetition aggregation."""

    def test_length_must_match_grid(self):
        """Test a sweep shorter than its grid is rejected."""
        with pytest.raises(GridMismatchError):
            SweepResult(phi_grid(4), np.zeros(9))

    def test_negative_stderr(self):
        """Test stderr must be non-negative."""
        with pytest.raises(ValueError):
            SweepResult(phi_grid(1), np.zeros(4), -np.ones(4))

    def test_identical_repetitions(self):
        """Test identical repetitions have zero stderr."""
        sweep = _ideal_sweep(3)
        result = aggregate_repetitions([sweep, sweep, sweep])
        np.testing.assert_allclose(result.s_stderr, 0.0)
        assert result.repetitions == 3

    def test_single_repetition(self):
        """Test one repetition leaves stderr undefined."""
        result = aggregate_repetitions([_ideal_sweep(3)])
        assert result.s_stderr is None
        assert mqc_spectrum(result).stderr(3) is None

    def test_mismatched_grids(self):
        """Test sweeps over different grids cannot be combined."""
        with pytest.raises(GridMismatchError):
            aggregate_repetitions([_ideal_sweep(3), _ideal_sweep(4)])

    def test_mean_and_stderr(self):
        """Test mean and sample standard error per point."""
        grid = PhiGrid(1)
        a = SweepResult(grid, [0.0, 0.2, 0.4, 0.6])
        b = SweepResult(grid, [1.0, 0.4, 0.4, 0.6])
        result = aggregate_repetitions([a, b])
        np.testing.assert_allclose(result.s_values, [0.5, 0.3, 0.4, 0.6])
        np.testing.assert_allclose(result.s_stderr, [0.5, 0.1, 0.0, 0.0], atol=1e-12)

    def test_stderr_matches_binomial(self, line_plan):
        """Test 8 seeded noisy repetitions give stderr within 3x the binomial value."""
        plan = line_plan(4)
        noise = NoiseModel(readout=ReadoutModel.from_flip_probabilities([0.03] * 4))
        grid = phi_grid(4)
        shots, reps = 2048, 8
        circuits = [build_mqc_circuit(plan, phi) for phi in grid.angles]
        sweeps = [
            SweepResult(
                grid,
                [s_phi(execute(c, noise, shots, 21, (j, rep))) for j, c in enumerate(circuits)],
            )
            for rep in range(reps)
        ]
        result = aggregate_repetitions(sweeps)
        for circuit, stderr in zip(circuits, result.s_stderr, strict=True):
            p = oracle_distribution(circuit, noise)["0000"]
            assert 0 < stderr <= 3 * np.sqrt(p * (1 - p) / shots / reps)


class TestMqcSpectrum:
    """Test cases for the DFT spectrum."""

    def test_ideal_four_qubits(self):
        """Test the ideal N=4 signal gives I_0 = 1/2 and I_4 = 1/4 only."""
        spectrum = mqc_spectrum(_ideal_sweep(4))
        np.testing.assert_allclose(spectrum.i_values, [0.5, 0, 0, 0, 0.25, 0], atol=1e-12)
        assert spectrum.intensity(-4) == spectrum.intensity(4)

    def test_constant_signal(self):
        """Test a constant signal only has zero-order weight."""
        spectrum = mqc_spectrum(SweepResult(phi_grid(3), np.full(8, 0.37)))
        np.testing.assert_allclose(spectrum.i_values, [0.37, 0, 0, 0, 0], atol=1e-12)

    def test_phase_shift_is_invisible(self):
        """Test a shifted oscillation keeps its intensities."""
        shifted = mqc_spectrum(_ideal_sweep(5, shift=0.4))
        assert shifted.intensity(5) == pytest.approx(0.25, abs=1e-12)
        assert shifted.intensity(0) == pytest.approx(0.5, abs=1e-12)

    def test_stderr_propagation(self):
        """Test a uniform point error sigma gives sigma/sqrt(M) on I_0."""
        grid = phi_grid(3)
        sweep = SweepResult(grid, 0.5 * (1 + np.cos(3 * grid.angles)), np.full(8, 0.01))
        spectrum = mqc_spectrum(sweep)
        assert spectrum.stderr(0) == pytest.approx(0.01 / np.sqrt(8))

    def test_mirrored(self):
        """Test mirrored output covers q = -q_max..q_max."""
        q, values, errors = mqc_spectrum(_ideal_sweep(2)).mirrored()
        assert q.tolist() == [-3, -2, -1, 0, 1, 2, 3]
        assert values[1] == values[5] == pytest.approx(0.25)
        assert errors is None

    @pytest.mark.slow
    def test_eighteen_qubit_ideal_spectrum(self, ghz_plan):
        """Test the noiseless 18-qubit spectrum and its saturated bounds."""
        plan = ghz_plan(18)
        grid = phi_grid(18)
        values = [
            apply_circuit(StateVector.zero(18), build_mqc_circuit(plan, phi)).probabilities()[0]
            for phi in grid.angles
        ]
        spectrum = mqc_spectrum(SweepResult(grid, values))
        assert spectrum.intensity(0) == pytest.approx(0.5, abs=1e-9)
        assert spectrum.intensity(18) == pytest.approx(0.25, abs=1e-9)
        others = np.delete(spectrum.i_values, [0, 18])
        assert np.all(others < 1e-9)
        assert fidelity_bounds(spectrum.intensity(0), spectrum.intensity(18)) == pytest.approx(
            (1.0, 1.0), abs=1e-9
        )

    def test_matches_exact_decomposition(self, rng, lossy_device: DeviceModel):
        """Test the DFT of the exact overlap signal equals the exact intensities."""
        noise = NoiseModel.from_device(lossy_device, readout=False)
        for trial in range(100):
            n = 2 + trial % 5
            rho = density_oracle(_random_noisy_circuit(rng, n), noise)
            grid = phi_grid(n)
            spectrum = mqc_spectrum(SweepResult(grid, exact_overlap_signal(rho, grid)))
            exact = mqc_decompose(rho)
            np.testing.assert_allclose(spectrum.i_values[: n + 1], exact[n:], atol=1e-9)
            assert spectrum.intensity(n + 1) < 1e-9
            assert exact.sum() == pytest.approx(rho.purity(), abs=1e-9)

    def test_random_three_qubit_state(self, rng):
        """Test the identity on unconstrained random states."""
        rho = _random_density(rng, 3)
        grid = phi_grid(3)
        spectrum = mqc_spectrum(SweepResult(grid, exact_overlap_signal(rho, grid)))
        np.testing.assert_allclose(spectrum.i_values[:4], mqc_decompose(rho)[3:], atol=1e-9)


class TestFidelityBounds:
    """Test cases for fidelity bounds and direct fidelity."""

    def test_ideal(self):
        """Test the ideal intensities saturate both bounds."""
        assert fidelity_bounds(0.5, 0.25) == pytest.approx((1.0, 1.0))

    def test_threshold_case(self):
        """Test I_N = 0.0626 sits just above the entanglement threshold."""
        lower, upper = fidelity_bounds(0.5, 0.0626)
        assert lower == pytest.approx(0.5004, abs=1e-4)
        assert upper >= lower

    def test_published_intensity_arithmetic(self):
        """Test I_N = 0.06265009 +- 0.001677 gives 0.5006 +- 0.0067."""
        report = fidelity_report(0.5, 0.06265009, 0.001677)
        assert report.lower == pytest.approx(0.5006, abs=1e-4)
        assert report.lower_stderr == pytest.approx(0.0067, abs=1e-4)
        assert report.entangled

    def test_upper_never_below_lower(self):
        """Test clamping keeps upper >= lower when I_0 is noisy."""
        lower, upper = fidelity_bounds(0.0, 0.3)
        assert lower == 1.0
        assert upper == 1.0
        assert fidelity_report(0.0, 0.3).upper_raw == pytest.approx(np.sqrt(0.3))

    def test_negative_inputs_clip(self):
        """Test negative intensities are treated as zero."""
        assert fidelity_bounds(-1e-6, -1e-6) == (0.0, 0.0)

    def test_direct_fidelity(self):
        """Test the ideal populations and intensity give 1."""
        assert direct_fidelity(0.5, 0.5, 0.25) == pytest.approx(1.0)
        assert direct_fidelity(0.6, 0.6, 0.25) == 1.0

    def test_report_with_direct_samples(self):
        """Test direct fidelity mean and stderr over repetitions."""
        report = fidelity_report(0.45, 0.16, 0.01, direct_samples=[0.80, 0.82, 0.84])
        assert report.direct == pytest.approx(0.82)
        assert report.direct_stderr == pytest.approx(0.02 / np.sqrt(3))
        assert report.lower == pytest.approx(0.8)
        assert report.entangled

    def test_not_entangled(self):
        """Test low intensities witness nothing."""
        assert not fidelity_report(0.3, 0.01).entangled

    def test_direct_matches_oracle(self, lossy_device: DeviceModel):
        """Test the direct formula equals <GHZ|rho|GHZ> on a noisy 5-qubit state."""
        plan = auto_plan(lossy_device, [0, 1, 2, 3, 4])
        rho = density_oracle(build_ghz_prep(plan), NoiseModel.from_device(lossy_device))
        corner = rho.corner
        assert corner.real > 0
        assert abs(corner.imag) < 1e-12
        probs = rho.probabilities()
        i_n = mqc_decompose(rho)[-1]
        formula = direct_fidelity(probs[0], probs[-1], i_n)
        assert formula == pytest.approx(rho.ghz_fidelity(), abs=1e-9)

        lower, upper = fidelity_bounds(mqc_decompose(rho)[5], i_n)
        assert lower <= formula + 1e-12
        assert formula <= upper + 1e-12

    def test_bounds_hold_on_random_states(self, rng):
        """Test 2 sqrt(I_N) <= F <= sqrt(I_0/2) + sqrt(I_N) on random phase-aligned states."""
        violations = 0
        for trial in range(10_000):
            n = 1 + trial % 3
            rho = _align_corner(_random_density(rng, n))
            intensities = mqc_decompose(rho)
            i_0, i_n = intensities[n], intensities[-1]
            fidelity = rho.ghz_fidelity()
            if 2 * np.sqrt(i_n) > fidelity + 1e-10:
                violations += 1
            if fidelity > np.sqrt(i_0 / 2) + np.sqrt(i_n) + 1e-10:
                violations += 1
        assert violations == 0


class TestParityCoherence:
    """Test cases for parity oscillation analysis."""

    def test_ideal_ghz(self):
        """Test the ideal 3-qubit GHZ has C = 1."""
        assert parity_coherence(_exact_parity_sweep(DensityMatrix.ghz(3)), 3) == pytest.approx(
            1.0, abs=1e-12
        )

    @pytest.mark.parametrize("corner,expected", [(0.3, 0.6), (0.15, 0.3)])
    def test_damped_corner(self, corner: float, expected: float):
        """Test C is twice the corner magnitude."""
        rho = DensityMatrix.ghz(4)
        rho.matrix[0, -1] = rho.matrix[-1, 0] = corner
        assert parity_coherence(_exact_parity_sweep(rho), 4) == pytest.approx(expected, abs=1e-12)

    def test_equals_twice_root_intensity(self, rng, lossy_device: DeviceModel):
        """Test C = 2 sqrt(I_N) on exact noisy and random states."""
        noise = NoiseModel.from_device(lossy_device, readout=False)
        for trial in range(20):
            n = 2 + trial % 4
            if trial % 2:
                rho = density_oracle(_random_noisy_circuit(rng, n), noise)
            else:
                rho = _random_density(rng, n)
            coherence = parity_coherence(_exact_parity_sweep(rho), n)
            assert coherence == pytest.approx(2 * np.sqrt(mqc_decompose(rho)[-1]), abs=1e-9)

    def test_grid_too_coarse(self):
        """Test a grid that cannot resolve frequency N is rejected."""
        sweep = SweepResult(PhiGrid(3), np.zeros(6))
        with pytest.raises(GridMismatchError):
            parity_coherence(sweep, 3)

    @pytest.mark.slow
    def test_sampled_coherence_matches_state(self, monkeypatch):
        """Test sampled C agrees with 2 sqrt(I_N) of the prepared state within stderr."""
        monkeypatch.setenv("MQC_TRAJECTORY_BATCH_SIZE", "4096")
        # Instant single-qubit gates keep the analysis layer noise-free.
        device = DeviceModel.uniform(
            3, [(0, 1), (1, 2)], gate_error_2q=0.03, duration_1q_ns=0.0, name="instant_1q"
        )
        plan = auto_plan(device, [0, 1, 2])
        noise = NoiseModel.from_device(device, readout=False)
        rho = density_oracle(build_ghz_prep(plan), noise)
        expected = 2 * np.sqrt(mqc_decompose(rho)[-1])

        grid = phi_grid(3)
        shots, reps = 16384, 8
        circuits = [build_parity_circuit(plan, phi) for phi in grid.angles]
        runs = []
        for rep in range(reps):
            values = [
                parity_expectation(execute(c, noise, shots, 8, (j, rep)))
                for j, c in enumerate(circuits)
            ]
            runs.append(SweepResult(grid, values))
        coherence, error = parity_coherence_with_error(aggregate_repetitions(runs), 3)
        assert expected < 0.99
        assert error < 0.01
        # Only C is sampled, so its stderr is the combined one. Seed 8 is fixed
        # and the band is three of them.
        assert abs(coherence - expected) <= 3 * error
