"""Phase grids for the collective rotation sweep."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhiGrid:
    """Angles pi*j/q_max for j = 0..2*q_max-1."""

    q_max: int

    def __post_init__(self) -> None:
        if self.q_max < 1:
            raise ValueError(f"q_max must be >= 1, got {self.q_max}")

    @property
    def angles(self) -> np.ndarray:
        return np.pi * np.arange(2 * self.q_max) / self.q_max

    def __len__(self) -> int:
        return 2 * self.q_max


def phi_grid(n: int) -> PhiGrid:
    """Grid resolving coherences up to order n + 1."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return PhiGrid(q_max=n + 1)
