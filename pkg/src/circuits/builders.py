"""Circuit families for GHZ preparation, MQC, parity oscillations and populations.

Builders work on logical qubits: plan.qubits[j] runs as logical qubit j,
so the root is logical 0. The physical labels travel in Circuit.layout.
"""

import numpy as np

from src.circuits.plan import EntanglingPlan
from src.models.experiment import MqcVariant
from src.simulator.circuit import Circuit
from src.simulator.gates import Gate, rx_matrix

_Z = np.diag([1.0, -1.0]).astype(complex)


Moment = list[Gate]


def _ghz_prep_moments(plan: EntanglingPlan) -> list[Moment]:
    logical = plan.logical()
    moments: list[Moment] = [[Gate.h(0, plan.single_qubit_duration(plan.root))]]
    for pairs in plan.schedule:
        moments.append(
            [Gate.cx(logical[c], logical[t], plan.cx_duration(c, t)) for c, t in pairs]
        )
    return moments


def _graph_edges(plan: EntanglingPlan, variant: MqcVariant) -> list[tuple[int, int]]:
    n = plan.num_qubits
    if variant is MqcVariant.STAR_GRAPH:
        return [(0, j) for j in range(1, n)]
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _graph_prep_moments(plan: EntanglingPlan, variant: MqcVariant) -> list[Moment]:
    n = plan.num_qubits
    scratch = Circuit(n)
    scratch.add_moment(
        [Gate.h(j, plan.single_qubit_duration(plan.qubits[j])) for j in range(n)]
    )
    for a, b in _graph_edges(plan, variant):
        pa, pb = plan.qubits[a], plan.qubits[b]
        h = plan.single_qubit_duration(pb)
        # CZ = H(target) CX H(target)
        scratch.extend([Gate.h(b, h), Gate.cx(a, b, plan.cx_duration(pa, pb)), Gate.h(b, h)])
    return [list(m) for m in scratch.moments]


def _prep_moments(plan: EntanglingPlan, variant: MqcVariant) -> list[Moment]:
    if variant is MqcVariant.GHZ:
        return _ghz_prep_moments(plan)
    return _graph_prep_moments(plan, variant)


def _inverse(moments: list[Moment]) -> list[Moment]:
    return [[g.dagger() for g in reversed(m)] for m in reversed(moments)]


def _new_circuit(plan: EntanglingPlan, moments: list[Moment]) -> Circuit:
    circuit = Circuit(plan.num_qubits, layout=plan.qubits)
    for moment in moments:
        circuit.add_moment(moment)
    return circuit


def _refocus_moment(plan: EntanglingPlan, variant: MqcVariant) -> Moment:
    durations = [plan.single_qubit_duration(q) for q in plan.qubits]
    if variant is MqcVariant.GHZ:
        return [Gate.x(j, durations[j]) for j in range(plan.num_qubits)]
    # X on the root times Z on the rest stabilises both graph states.
    return [Gate.x(0, durations[0])] + [
        Gate.u1q(j, _Z, durations[j]) for j in range(1, plan.num_qubits)
    ]


def _rotation_moments(plan: EntanglingPlan, phi: float, variant: MqcVariant) -> list[Moment]:
    n = plan.num_qubits
    durations = [plan.single_qubit_duration(q) for q in plan.qubits]
    if variant is MqcVariant.GHZ:
        return [[Gate.rz(j, phi) for j in range(n)]]
    scratch = Circuit(n)
    if variant is MqcVariant.STAR_GRAPH:
        scratch.append(Gate.rz(0, phi))
        for j in range(1, n):
            scratch.extend([Gate.h(j, durations[j]), Gate.rz(j, phi), Gate.h(j, durations[j])])
    else:
        for j in range(n):
            scratch.extend(
                [
                    Gate.u1q(j, rx_matrix(-np.pi / 2), durations[j]),
                    Gate.rz(j, phi),
                    Gate.u1q(j, rx_matrix(np.pi / 2), durations[j]),
                ]
            )
    return [list(m) for m in scratch.moments]


def build_ghz_prep(plan: EntanglingPlan) -> Circuit:
    """H on the root followed by the plan's CX moments.

    Args:
        plan: Validated entangling plan

    Returns:
        Circuit preparing (|0...0> + |1...1>)/sqrt(2) from the ground state
    """
    return _new_circuit(plan, _ghz_prep_moments(plan))


def build_mqc_circuit(
    plan: EntanglingPlan,
    phi: float,
    refocus: bool = False,
    variant: MqcVariant = MqcVariant.GHZ,
) -> Circuit:
    """Prepare, optionally refocus, rotate by phi, unprepare, measure all.

    The refocusing layer sits in its own moment right before the rotation;
    no second pi layer follows.

    Args:
        plan: Validated entangling plan
        phi: Collective rotation angle (radians)
        refocus: Insert the pi-pulse layer
        variant: GHZ or one of the graph-state variants

    Returns:
        Circuit whose all-zeros probability is the overlap signal S_phi
    """
    prep = _prep_moments(plan, variant)
    moments = list(prep)
    if refocus:
        moments.append(_refocus_moment(plan, variant))
    moments.extend(_rotation_moments(plan, phi, variant))
    moments.extend(_inverse(prep))
    return _new_circuit(plan, moments)


def build_parity_circuit(plan: EntanglingPlan, phi: float) -> Circuit:
    """GHZ preparation then exp(i pi/4 (cos phi X + sin phi Y)) on every qubit."""
    moments = _ghz_prep_moments(plan)
    moments.append(
        [
            Gate.rxy(j, -np.pi / 2, phi, plan.single_qubit_duration(q))
            for j, q in enumerate(plan.qubits)
        ]
    )
    return _new_circuit(plan, moments)


def build_populations_circuit(plan: EntanglingPlan) -> Circuit:
    """GHZ preparation measured directly, for P(0...0) and P(1...1)."""
    return build_ghz_prep(plan)
