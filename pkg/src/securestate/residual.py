"""Least-squares residual of a sensor subset and the feasibility predicate."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ._validation import check_epsilon
from .system import build_observability

DEFAULT_EPSILON = 1e-5


@dataclass(frozen=True, eq=False)
class ResidualResult:
    x_hat: np.ndarray
    residual: float
    rank: int


def _as_array(O):
    return np.asarray(getattr(O, "O", O), dtype=float)


def min_residual(Y_I, O_I):
    """Minimise ``||Y_I - O_I x||_2`` over ``x``.

    Solved through an SVD-based least-squares driver, so the minimiser is the
    minimum-norm one when ``O_I`` is rank deficient. An empty row set yields a
    zero residual and a zero state.
    """
    O = _as_array(O_I)
    Y = np.asarray(Y_I, dtype=float)
    if O.ndim != 2 or Y.ndim != 1 or O.shape[0] != Y.shape[0]:
        raise ValueError(
            f"dimension mismatch: O_I has shape {O.shape}, Y_I has shape {Y.shape}"
        )
    n = O.shape[1]
    if O.shape[0] == 0:
        return ResidualResult(np.zeros(n), 0.0, 0)
    x_hat, _, rank, _ = linalg.lstsq(O, Y, lapack_driver="gelsd", check_finite=False)
    residual = float(np.linalg.norm(Y - O @ x_hat))
    return ResidualResult(x_hat, residual, int(rank))


def is_feasible(Y_I, O_I, w_bar_I, epsilon=DEFAULT_EPSILON):
    """Strict test ``min_x ||Y_I - O_I x|| < w_bar_I + sqrt(epsilon)``."""
    epsilon = check_epsilon(epsilon)
    if w_bar_I < 0:
        raise ValueError("w_bar_I must be non-negative")
    return min_residual(Y_I, O_I).residual < w_bar_I + np.sqrt(epsilon)


def combine_noise_bound(noise_bounds, index_set):
    """Return ``sqrt(sum_{i in I} w_bar_i**2)``."""
    bounds = np.asarray(noise_bounds, dtype=float)
    if np.any(bounds < 0):
        raise ValueError("noise bounds must be non-negative")
    selected = bounds[list(index_set)] if len(index_set) else np.zeros(0)
    return float(np.sqrt(np.sum(selected ** 2)))


def estimate_epsilon_star(system, T=None, sample_count=100, seed=None, states=None):
    """Sampled stand-in for the smallest accuracy every reachable state meets.

    For each sampled state ``x'`` the attack-free, noiseless window ``O x'`` is
    fitted back by least squares; the largest squared residual is returned.
    In exact arithmetic this is zero, so the value measures round-off only
    and is meant for sanity-checking a chosen ``epsilon``. Explicit `states`
    (rows) override sampling.
    """
    T = system.n if T is None else T
    O = build_observability(system, T).O
    if states is None:
        if sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        rng = np.random.default_rng(seed)
        states = rng.uniform(-1.0, 1.0, size=(sample_count, system.n))
    worst = 0.0
    for x in np.atleast_2d(states):
        worst = max(worst, min_residual(O @ x, O).residual ** 2)
    return worst
