"""Least squares on the probability simplex."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

KKT_TOL = 1e-10


@dataclass
class SimplexSolution:
    x: np.ndarray
    residual: float
    iterations: int
    degenerate: bool


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1} (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - 1.0
    ranks = np.arange(1, len(v) + 1)
    rho = np.flatnonzero(u - cumulative / ranks > 0)[-1]
    theta = cumulative[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def _equality_lsq(gram: np.ndarray, rhs: np.ndarray, free: np.ndarray) -> np.ndarray:
    f = np.flatnonzero(free)
    size = len(f)
    kkt = np.zeros((size + 1, size + 1))
    kkt[:size, :size] = 2 * gram[np.ix_(f, f)]
    kkt[:size, size] = 1.0
    kkt[size, :size] = 1.0
    b = np.concatenate([2 * rhs[f], [1.0]])
    solution = scipy.linalg.lstsq(kkt, b)[0]
    return solution[:size]


def kkt_multipliers(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Bound multipliers g_i + nu, with nu fixed by the support of x."""
    gradient = 2 * a.T @ (a @ x - b)
    support = x > 0
    nu = -gradient[support].mean() if np.any(support) else 0.0
    return gradient + nu


def solve_simplex_lsq(
    a: np.ndarray, b: np.ndarray, tol: float = KKT_TOL, max_iter: int | None = None
) -> SimplexSolution:
    """argmin ||A x - b||^2 subject to x >= 0 and sum x = 1.

    Primal active set: starting from the projection of b, solve the
    equality-constrained problem on the free coordinates, step back to the
    boundary when that solution leaves the simplex, and free the coordinate
    with the most negative multiplier until none is negative.

    Falls back to the projection of b, flagged degenerate, when A has an
    empty column or the iteration does not settle.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k = a.shape[1]
    fallback = project_to_simplex(b)

    def finish(x: np.ndarray, iterations: int, degenerate: bool) -> SimplexSolution:
        residual = float(np.sum((a @ x - b) ** 2))
        return SimplexSolution(x, residual, iterations, degenerate)

    if np.any(np.all(np.abs(a) <= 1e-300, axis=0)):
        logger.warning("Calibration matrix has an empty column; projecting measured frequencies")
        return finish(fallback, 0, True)

    gram = a.T @ a
    rhs = a.T @ b
    x = fallback.copy()
    free = x > 0
    limit = max_iter or 50 * k + 100

    for iteration in range(1, limit + 1):
        y = _equality_lsq(gram, rhs, free)
        f = np.flatnonzero(free)
        if np.all(y >= -tol):
            x = np.zeros(k)
            x[f] = np.maximum(y, 0.0)
            x /= x.sum()
            multipliers = 2 * (gram @ x - rhs)
            multipliers += -multipliers[f].mean()
            multipliers[free] = 0.0
            j = int(np.argmin(multipliers))
            if multipliers[j] >= -tol:
                logger.debug(f"Simplex solve converged after {iteration} iterations")
                return finish(x, iteration, False)
            free[j] = True
        else:
            current = x[f]
            step = y - current
            blocking = y < 0
            ratios = current[blocking] / (current[blocking] - y[blocking])
            alpha = float(np.min(ratios))
            x[f] = current + alpha * step
            leaving = f[blocking][ratios <= alpha + 1e-15]
            x[leaving] = 0.0
            x = np.maximum(x, 0.0)
            free = x > 0
            if not np.any(free):
                break

    logger.warning("Simplex solve did not converge; projecting measured frequencies")
    return finish(fallback, limit, True)
