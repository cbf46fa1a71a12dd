"""Monte Carlo trajectory execution of noisy circuits."""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import ndtri

from src.core.config import get_settings
from src.core.exceptions import SimulationSizeError
from src.noise.channels import KrausChannel
from src.noise.model import NoiseModel, ReadoutModel
from src.simulator.bitstrings import to_label
from src.simulator.circuit import Circuit
from src.simulator.kernels import (
    apply_matrices,
    apply_matrix,
    apply_rz_angles,
    reduced_density,
    z_phase_table,
)
from src.simulator.seeding import philox_key, seed_sequence, shot_uniforms
from src.simulator.statevector import MAX_QUBITS, StateVector, apply_circuit, sample_counts

logger = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny


class OpKind(Enum):
    UNITARY = "unitary"
    CHANNEL = "channel"
    DRIFT = "drift"


@dataclass
class Op:
    kind: OpKind
    qubits: tuple[int, ...] = ()
    matrix: np.ndarray | None = None
    channel: KrausChannel | None = None
    slot: int = -1
    tau: float = 0.0


@dataclass
class Program:
    """Circuit flattened into unitaries, channel draws and drift steps.

    Uniform columns per shot: drift normals first, then one column per
    channel draw, the outcome draw, then readout.
    """

    num_qubits: int
    ops: list[Op]
    drift_sigma: float
    readout: ReadoutModel | None
    channel_slots: int
    per_shot: int = field(init=False)

    def __post_init__(self) -> None:
        used = self.drift_offset + self.channel_slots + 1 + self.num_qubits
        self.per_shot = -(-used // 4) * 4

    @property
    def drift_offset(self) -> int:
        return self.num_qubits if self.drift_sigma > 0 else 0

    @property
    def outcome_slot(self) -> int:
        return self.drift_offset + self.channel_slots

    @property
    def readout_offset(self) -> int:
        return self.outcome_slot + 1


def compile_program(circuit: Circuit, noise: NoiseModel) -> Program:
    """Expand a circuit with its noise into an op list, moment by moment.

    Each moment of duration tau runs: half the drift, its gates each followed
    by the gate channel, idle relaxation on untouched qubits, the other half
    of the drift.
    """
    ops: list[Op] = []
    slots = 0
    drift = noise.drift_sigma > 0
    for index, moment in enumerate(circuit.moments):
        tau = circuit.moment_duration(index)
        if drift and tau > 0:
            ops.append(Op(OpKind.DRIFT, tau=tau / 2))
        busy: set[int] = set()
        for gate in moment:
            busy.update(gate.qubits)
            ops.append(Op(OpKind.UNITARY, gate.qubits, matrix=gate.matrix))
            channel = noise.gate_channel(gate, circuit.layout)
            if channel is not None:
                ops.append(Op(OpKind.CHANNEL, gate.qubits, channel=channel, slot=slots))
                slots += 1
        if tau > 0:
            for q in range(circuit.num_qubits):
                if q in busy:
                    continue
                channel = noise.idle_channel(circuit.layout[q], tau)
                if channel is not None:
                    ops.append(Op(OpKind.CHANNEL, (q,), channel=channel, slot=slots))
                    slots += 1
        if drift and tau > 0:
            ops.append(Op(OpKind.DRIFT, tau=tau / 2))
    return Program(
        num_qubits=circuit.num_qubits,
        ops=ops,
        drift_sigma=noise.drift_sigma,
        readout=noise.readout_for(circuit),
        channel_slots=slots,
    )


def _batch_size(num_qubits: int) -> int:
    settings = get_settings()
    budget = settings.max_state_memory_mb * 2**20
    # Rough peak: a few temporaries of the (batch, 2**n) complex array.
    per_state = 16 * 2**num_qubits * 4
    return max(1, min(settings.trajectory_batch_size, budget // per_state))


def _sample_branch(states: np.ndarray, op: Op, u: np.ndarray, n: int) -> np.ndarray:
    channel = op.channel
    rho = reduced_density(states, op.qubits, n)
    probs = np.einsum("kij,bji->bk", channel.effects, rho).real
    cumulative = np.cumsum(probs, axis=1)
    target = u * cumulative[:, -1]
    choice = np.minimum((cumulative < target[:, None]).sum(axis=1), len(channel.operators) - 1)
    states = apply_matrices(states, channel.stacked[choice], op.qubits, n)
    norms = np.sqrt(np.sum(np.abs(states) ** 2, axis=1))
    return states / norms[:, None]


def _apply_readout(outcomes: np.ndarray, readout: ReadoutModel, u: np.ndarray) -> np.ndarray:
    n = readout.num_qubits
    if readout.full is not None:
        columns = readout.full[:, outcomes].T
        cumulative = np.cumsum(columns, axis=1)
        target = u[:, 0] * cumulative[:, -1]
        return np.minimum((cumulative < target[:, None]).sum(axis=1), 2**n - 1)
    shifts = np.arange(n)
    bits = (outcomes[:, None] >> shifts[None, :]) & 1
    p_flip = np.where(bits == 0, readout.confusion[:, 1, 0], readout.confusion[:, 0, 1])
    flips = (u < p_flip).astype(np.int64)
    return outcomes ^ (flips << shifts[None, :]).sum(axis=1)


def _run_batch(program: Program, uniforms: np.ndarray) -> np.ndarray:
    n = program.num_qubits
    batch = uniforms.shape[0]
    states = np.zeros((batch, 2**n), dtype=np.complex128)
    states[:, 0] = 1.0
    if program.drift_sigma > 0:
        table = z_phase_table(n)
        normals = ndtri(np.clip(uniforms[:, :n], _TINY, None))
        rates = program.drift_sigma * normals
    for op in program.ops:
        if op.kind is OpKind.UNITARY:
            states = apply_matrix(states, op.matrix, op.qubits, n)
        elif op.kind is OpKind.CHANNEL:
            states = _sample_branch(states, op, uniforms[:, program.drift_offset + op.slot], n)
        else:
            states = apply_rz_angles(states, rates * op.tau, table)

    probs = np.abs(states) ** 2
    cumulative = np.cumsum(probs, axis=1)
    target = uniforms[:, program.outcome_slot] * cumulative[:, -1]
    outcomes = np.minimum((cumulative < target[:, None]).sum(axis=1), 2**n - 1)
    if program.readout is not None:
        start = program.readout_offset
        outcomes = _apply_readout(outcomes, program.readout, uniforms[:, start : start + n])
    return outcomes


def run_trajectories(
    circuit: Circuit,
    noise: NoiseModel,
    shots: int,
    seed: int,
    stream: tuple[int, ...] = (),
    batch_size: int | None = None,
) -> dict[str, int]:
    """Sample measurement counts from stochastic pure-state trajectories.

    Shot s uses uniforms at a fixed offset of the Philox stream keyed by
    (seed, *stream), so counts do not depend on the batch size.

    Args:
        circuit: Circuit to run (at most MAX_QUBITS qubits)
        noise: Noise model
        shots: Number of shots, at least 1
        seed: Master seed
        stream: Extra integers identifying the experiment point
        batch_size: Trajectories per vectorised batch; defaults from settings

    Returns:
        Bitstring -> count, summing to shots
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    n = circuit.num_qubits
    if n > MAX_QUBITS:
        raise SimulationSizeError(n, MAX_QUBITS)
    program = compile_program(circuit, noise)
    key = philox_key(seed, *stream)
    batch = batch_size or _batch_size(n)
    logger.debug(
        f"Running {shots} trajectories on {n} qubits: {len(program.ops)} ops, "
        f"{program.per_shot} uniforms per shot, batch {batch}"
    )

    outcomes = np.empty(shots, dtype=np.int64)
    for start in range(0, shots, batch):
        size = min(batch, shots - start)
        uniforms = shot_uniforms(key, start, size, program.per_shot)
        outcomes[start : start + size] = _run_batch(program, uniforms)

    values, counts = np.unique(outcomes, return_counts=True)
    return {to_label(int(v), n): int(c) for v, c in zip(values, counts, strict=True)}


def execute(
    circuit: Circuit,
    noise: NoiseModel,
    shots: int,
    seed: int,
    stream: tuple[int, ...] = (),
) -> dict[str, int]:
    """Counts for a circuit, sampling the exact statevector when nothing is noisy."""
    if noise.is_noiseless(circuit):
        state = apply_circuit(StateVector.zero(circuit.num_qubits), circuit)
        return sample_counts(state, shots, seed_sequence(seed, *stream))
    return run_trajectories(circuit, noise, shots, seed, stream)
