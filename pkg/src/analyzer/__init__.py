"""Analysis of sweeps: spectra, fidelity bounds and parity coherence."""

from src.analyzer.fidelity import (
    FidelityReport,
    direct_fidelity,
    fidelity_bounds,
    fidelity_report,
    parity_coherence,
)
from src.analyzer.observables import (
    excitation_census,
    excitation_histogram,
    parity_expectation,
    populations,
    s_phi,
)
from src.analyzer.spectrum import (
    MqcSpectrum,
    SweepResult,
    aggregate_repetitions,
    exact_overlap_signal,
    mqc_spectrum,
)

__all__ = [
    "FidelityReport",
    "MqcSpectrum",
    "SweepResult",
    "aggregate_repetitions",
    "direct_fidelity",
    "exact_overlap_signal",
    "excitation_census",
    "excitation_histogram",
    "fidelity_bounds",
    "fidelity_report",
    "mqc_spectrum",
    "parity_coherence",
    "parity_expectation",
    "populations",
    "s_phi",
]
