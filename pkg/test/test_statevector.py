"""Tests for gates, circuits and dense statevector simulation."""

import numpy as np
import pytest
from src.circuits.builders import build_ghz_prep, build_mqc_circuit
from src.core.exceptions import (
    CircuitError,
    NonUnitaryGateError,
    QubitIndexError,
    SimulationSizeError,
)
from src.simulator.bitstrings import bit_table, excitation, popcount, to_index, to_label
from src.simulator.circuit import Circuit
from src.simulator.gates import Gate, GateKind, rxy_matrix, rz_matrix
from src.simulator.seeding import label_id, philox_key, shot_uniforms
from src.simulator.statevector import (
    MAX_QUBITS,
    StateVector,
    apply_circuit,
    apply_gate,
    probability_of,
    sample_counts,
)


def _basis(n: int, label: str) -> StateVector:
    amplitudes = np.zeros(2**n, dtype=complex)
    amplitudes[to_index(label)] = 1.0
    return StateVector(n, amplitudes)


class TestBitstrings:
    """Test cases for the little-endian label convention."""

    def test_label_round_trip(self):
        """Test qubit 0 is the rightmost character."""
        assert to_label(1, 3) == "001"
        assert to_index("100") == 4

    def test_excitation_and_popcount(self):
        """Test excitation number agrees with vectorised popcount."""
        labels = [to_label(k, 5) for k in range(32)]
        weights = popcount(np.arange(32))
        assert [excitation(s) for s in labels] == weights.tolist()

    def test_bit_table(self):
        """Test bit table rows hold little-endian bits."""
        table = bit_table(3)
        assert table[6].tolist() == [0, 1, 1]


class TestGate:
    """Test cases for gate construction."""

    def test_cx_needs_two_distinct_qubits(self):
        """Test CX arity and distinctness checks."""
        with pytest.raises(CircuitError):
            Gate(GateKind.CX, (1,))
        with pytest.raises(CircuitError):
            Gate.cx(2, 2)

    def test_single_qubit_gate_rejects_two_qubits(self):
        """Test one-qubit gates take exactly one index."""
        with pytest.raises(CircuitError):
            Gate(GateKind.H, (0, 1))

    def test_u1q_must_be_unitary(self):
        """Test non-unitary matrices are rejected."""
        with pytest.raises(NonUnitaryGateError):
            Gate.u1q(0, np.array([[1, 0], [0, 2]]))

    def test_rz_matrix_convention(self):
        """Test RZ(theta) = diag(e^{i theta/2}, e^{-i theta/2})."""
        np.testing.assert_allclose(
            rz_matrix(0.4), np.diag([np.exp(0.2j), np.exp(-0.2j)]), atol=1e-15
        )

    def test_dagger_inverts(self):
        """Test every gate times its dagger is the identity."""
        gates = [
            Gate.h(0),
            Gate.x(0),
            Gate.rz(0, 0.3),
            Gate.rxy(0, 1.1, 0.4),
            Gate.u1q(0, rxy_matrix(0.7, 1.9)),
        ]
        for gate in gates:
            np.testing.assert_allclose(gate.dagger().matrix @ gate.matrix, np.eye(2), atol=1e-12)


class TestCircuit:
    """Test cases for moment packing."""

    def test_append_packs_disjoint_gates(self):
        """Test gates on different qubits share a moment."""
        circuit = Circuit(3).extend([Gate.h(0), Gate.h(1), Gate.cx(0, 2)])
        assert circuit.depth == 2
        assert len(circuit.moments[0]) == 2

    def test_add_moment_is_a_barrier(self):
        """Test gates appended after add_moment stay behind it."""
        circuit = Circuit(2).add_moment([Gate.h(0)])
        circuit.append(Gate.h(1))
        assert circuit.depth == 2

    def test_add_moment_rejects_repeated_qubit(self):
        """Test a moment cannot use a qubit twice."""
        with pytest.raises(CircuitError):
            Circuit(2).add_moment([Gate.h(0), Gate.x(0)])

    def test_out_of_range_qubit(self):
        """Test gates beyond the register raise QubitIndexError."""
        with pytest.raises(QubitIndexError):
            Circuit(2).append(Gate.h(2))

    def test_moment_duration(self):
        """Test a moment lasts as long as its slowest gate."""
        circuit = Circuit(3).add_moment([Gate.h(0, 50), Gate.cx(1, 2, 400)])
        assert circuit.moment_duration(0) == 400


class TestApplyGate:
    """Test cases for apply_gate."""

    def test_hadamard_on_zero(self):
        """Test H|0> = (|0> + |1>)/sqrt(2)."""
        state = apply_gate(StateVector.zero(1), Gate.h(0))
        np.testing.assert_allclose(state.amplitudes, [1 / np.sqrt(2)] * 2, atol=1e-12)

    def test_cx_truth_table(self):
        """Test CX(0, 1) maps qubit0=1 (label 01) to 11."""
        state = apply_gate(_basis(2, "01"), Gate.cx(0, 1))
        assert probability_of(state, "11") == pytest.approx(1.0)

    def test_rz_relative_phase(self):
        """Test RZ(phi) on |+> gives e^{i phi/2}|0> + e^{-i phi/2}|1>."""
        phi = 0.9
        state = apply_gate(apply_gate(StateVector.zero(1), Gate.h(0)), Gate.rz(0, phi))
        expected = np.array([np.exp(0.5j * phi), np.exp(-0.5j * phi)]) / np.sqrt(2)
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    def test_returns_new_state(self):
        """Test the input state is not modified."""
        state = StateVector.zero(1)
        apply_gate(state, Gate.x(0))
        assert state.amplitudes[0] == 1.0

    def test_index_out_of_range(self):
        """Test gates on missing qubits raise QubitIndexError."""
        with pytest.raises(QubitIndexError):
            apply_gate(StateVector.zero(2), Gate.h(3))

    def test_norm_preserved(self, rng: np.random.Generator):
        """Test norm stays 1 through a random circuit."""
        state = StateVector.zero(4)
        for _ in range(40):
            q = int(rng.integers(4))
            gate = Gate.rxy(q, *rng.uniform(0, 2 * np.pi, 2))
            state = apply_gate(state, gate)
            state = apply_gate(state, Gate.cx(q, (q + 1) % 4))
        assert np.vdot(state.amplitudes, state.amplitudes).real == pytest.approx(1.0, abs=1e-9)


class TestApplyCircuit:
    """Test cases for apply_circuit."""

    def test_bell_state(self):
        """Test H then CX prepares (|00> + |11>)/sqrt(2)."""
        circuit = Circuit(2).extend([Gate.h(0), Gate.cx(0, 1)])
        state = apply_circuit(StateVector.zero(2), circuit)
        assert probability_of(state, "00") == pytest.approx(0.5)
        assert probability_of(state, "11") == pytest.approx(0.5)

    def test_empty_circuit(self):
        """Test an empty circuit leaves the state unchanged."""
        state = _basis(3, "101")
        out = apply_circuit(state, Circuit(3))
        np.testing.assert_array_equal(out.amplitudes, state.amplitudes)

    def test_size_mismatch(self):
        """Test a circuit of another size raises CircuitError."""
        with pytest.raises(CircuitError):
            apply_circuit(StateVector.zero(2), Circuit(3))

    def test_eighteen_qubit_ghz(self, ghz_plan):
        """Test the 18-qubit device plan prepares an exact GHZ state."""
        state = apply_circuit(StateVector.zero(18), build_ghz_prep(ghz_plan(18)))
        probs = state.probabilities()
        assert probs[0] == pytest.approx(0.5, abs=1e-12)
        assert probs[-1] == pytest.approx(0.5, abs=1e-12)
        assert probs[1:-1].sum() < 1e-12


class TestProbabilityOf:
    """Test cases for probability_of."""

    def test_ghz_probabilities(self, line_plan):
        """Test GHZ(4) has P(0000) = 0.5 and P(0001) = 0."""
        state = apply_circuit(StateVector.zero(4), build_ghz_prep(line_plan(4)))
        assert probability_of(state, "0000") == pytest.approx(0.5)
        assert probability_of(state, "0001") == pytest.approx(0.0, abs=1e-15)

    def test_post_mqc_state(self, line_plan):
        """Test noiseless MQC at phi = pi/5 for N=4 returns (1 + cos(4 pi/5))/2."""
        circuit = build_mqc_circuit(line_plan(4), np.pi / 5)
        state = apply_circuit(StateVector.zero(4), circuit)
        assert probability_of(state, "0000") == pytest.approx(0.0955, abs=1e-4)
        assert probability_of(state, "0000") == pytest.approx(
            0.5 * (1 + np.cos(4 * np.pi / 5)), abs=1e-12
        )

    def test_length_mismatch(self):
        """Test a bitstring of the wrong width raises CircuitError."""
        with pytest.raises(CircuitError):
            probability_of(StateVector.zero(2), "000")


class TestSampleCounts:
    """Test cases for sample_counts."""

    def test_deterministic_state(self):
        """Test |0> always measures 0."""
        assert sample_counts(StateVector.zero(1), 100, seed=1) == {"0": 100}

    def test_bell_statistics(self):
        """Test Bell counts lie within 4 sigma of 8192."""
        circuit = Circuit(2).extend([Gate.h(0), Gate.cx(0, 1)])
        counts = sample_counts(apply_circuit(StateVector.zero(2), circuit), 16384, seed=11)
        assert set(counts) <= {"00", "11"}
        assert sum(counts.values()) == 16384
        assert abs(counts["00"] - 8192) <= 4 * 64

    def test_same_seed_same_counts(self):
        """Test sampling is reproducible."""
        state = apply_gate(StateVector.zero(1), Gate.h(0))
        assert sample_counts(state, 1000, seed=5) == sample_counts(state, 1000, seed=5)

    def test_shots_must_be_positive(self):
        """Test zero shots is rejected."""
        with pytest.raises(ValueError):
            sample_counts(StateVector.zero(1), 0, seed=0)


class TestStateVector:
    """Test cases for StateVector validation."""

    def test_rejects_unnormalised(self):
        """Test amplitudes must have unit norm."""
        with pytest.raises(CircuitError):
            StateVector(1, np.array([1.0, 1.0]))

    def test_size_cap(self):
        """Test registers above the cap raise SimulationSizeError."""
        with pytest.raises(SimulationSizeError):
            StateVector.zero(MAX_QUBITS + 1)


class TestSeeding:
    """Test cases for counter-based shot streams."""

    def test_label_id_is_stable(self):
        """Test label ids are deterministic 63-bit integers."""
        assert label_id("mqc") == label_id("mqc")
        assert 0 <= label_id("mqc") < 2**63
        assert label_id("mqc") != label_id("parity")

    def test_shot_uniforms_independent_of_batching(self):
        """Test shot s sees the same uniforms whatever the batch split."""
        key = philox_key(3, 1, 2)
        whole = shot_uniforms(key, 0, 10, 8)
        parts = np.vstack([shot_uniforms(key, 0, 4, 8), shot_uniforms(key, 4, 6, 8)])
        np.testing.assert_array_equal(whole, parts)

    def test_per_shot_multiple_of_four(self):
        """Test uneven per-shot widths are rejected."""
        with pytest.raises(ValueError):
            shot_uniforms(philox_key(0), 0, 1, 6)
