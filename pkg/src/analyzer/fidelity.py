"""GHZ fidelity bounds, direct fidelity and parity coherence."""

from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, Field

from src.analyzer.spectrum import SweepResult, dft_amplitude
from src.core.exceptions import GridMismatchError

ENTANGLEMENT_THRESHOLD = 0.5


class FidelityReport(BaseModel):
    """Bounds and estimates of the fidelity with the ideal GHZ state."""

    lower: float = Field(..., description="2 sqrt(I_N), clamped to [0, 1]")
    lower_stderr: float | None = Field(default=None, description="Propagated error of lower")
    upper: float = Field(..., description="sqrt(I_0/2) + sqrt(I_N), clamped to [lower, 1]")
    upper_raw: float = Field(..., description="Unclamped upper bound")
    direct: float | None = Field(default=None, description="Populations plus sqrt(I_N)")
    direct_stderr: float | None = Field(default=None, description="Error over repetitions")
    entangled: bool = Field(..., description="Witnesses genuine multipartite entanglement")


def _clamp(value: float) -> float:
    return float(min(1.0, max(0.0, value)))


def fidelity_bounds(i_0: float, i_n: float) -> tuple[float, float]:
    """Lower and upper GHZ fidelity bounds from two MQC intensities.

    Args:
        i_0: Zero-order intensity
        i_n: Intensity at the register size N

    Returns:
        (2 sqrt(I_N), min(1, sqrt(I_0/2) + sqrt(I_N))), lower clamped to [0, 1]
    """
    i_0, i_n = max(i_0, 0.0), max(i_n, 0.0)
    lower = _clamp(2 * np.sqrt(i_n))
    upper = min(1.0, float(np.sqrt(i_0 / 2) + np.sqrt(i_n)))
    return lower, max(upper, lower)


def direct_fidelity(p_allzero: float, p_allone: float, i_n: float) -> float:
    """(P_0...0 + P_1...1)/2 + sqrt(I_N), clamped to [0, 1]."""
    return _clamp(0.5 * (p_allzero + p_allone) + np.sqrt(max(i_n, 0.0)))


def parity_coherence(parity: SweepResult, n: int) -> float:
    """Coherence 2|sum_j e^{i N phi_j} P_j| / (2 q_max) of a parity sweep.

    Raises:
        GridMismatchError: If the grid cannot resolve frequency N
    """
    if parity.grid.q_max <= n:
        raise GridMismatchError(
            f"grid q_max={parity.grid.q_max} cannot resolve frequency {n}",
            q_max=parity.grid.q_max,
            n=n,
        )
    amplitude, _ = dft_amplitude(parity.s_values, None, parity.grid.angles, n)
    return 2 * amplitude


def parity_coherence_with_error(parity: SweepResult, n: int) -> tuple[float, float | None]:
    coherence = parity_coherence(parity, n)
    _, error = dft_amplitude(parity.s_values, parity.s_stderr, parity.grid.angles, n)
    return coherence, None if error is None else 2 * error


def _mean_and_stderr(samples: Sequence[float]) -> tuple[float, float | None]:
    data = np.asarray(samples, dtype=float)
    if len(data) < 2:
        return float(data.mean()), None
    return float(data.mean()), float(data.std(ddof=1) / np.sqrt(len(data)))


def fidelity_report(
    i_0: float,
    i_n: float,
    i_n_stderr: float | None = None,
    direct_samples: Sequence[float] | None = None,
) -> FidelityReport:
    """Assemble bounds and, when per-repetition samples exist, the direct fidelity."""
    lower, upper = fidelity_bounds(i_0, i_n)
    upper_raw = float(np.sqrt(max(i_0, 0.0) / 2) + np.sqrt(max(i_n, 0.0)))
    lower_stderr = None
    if i_n_stderr is not None:
        lower_stderr = float(i_n_stderr / np.sqrt(i_n)) if i_n > 0 else float(2 * np.sqrt(i_n_stderr))

    direct = direct_stderr = None
    if direct_samples:
        direct, direct_stderr = _mean_and_stderr(direct_samples)

    entangled = lower > ENTANGLEMENT_THRESHOLD or (
        direct is not None and direct > ENTANGLEMENT_THRESHOLD
    )
    return FidelityReport(
        lower=lower,
        lower_stderr=lower_stderr,
        upper=upper,
        upper_raw=upper_raw,
        direct=direct,
        direct_stderr=direct_stderr,
        entangled=entangled,
    )
