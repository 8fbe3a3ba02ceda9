"""LTI plant model, observability matrices and stacked measurement windows.

Sensors are indexed from 0. Stacked quantities are time-major: the first
``p`` rows hold every sensor at the earliest instant of the window, the next
``p`` rows the following instant, and so on.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from ._validation import (
    SensorIndexError,
    check_index_set,
    check_matrix,
    check_positive_int,
    check_vector,
    max_attack_cap,
)

DEFAULT_RANK_RTOL = 1e-10


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class LtiSystem:
    """Autonomous plant ``x(t+1) = A x(t)``, ``y(t) = C x(t)``."""

    A: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = check_matrix(self.A, "A")
        if A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise ValueError(f"A must be square and non-empty, got shape {A.shape}")
        C = check_matrix(self.C, "C")
        if C.shape[1] != A.shape[0] or C.shape[0] < 1:
            raise ValueError(
                f"C must have shape (p, {A.shape[0]}) with p >= 1, got {C.shape}"
            )
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "C", _frozen(C))

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def p(self):
        return self.C.shape[0]

    def to_dict(self):
        return {
            "n": self.n,
            "p": self.p,
            "A": self.A.ravel().tolist(),
            "C": self.C.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        n, p = int(data["n"]), int(data["p"])
        A = np.asarray(data["A"], dtype=float)
        C = np.asarray(data["C"], dtype=float)
        if A.size != n * n or C.size != p * n:
            raise ValueError(
                f"system file declares n={n}, p={p} but carries "
                f"{A.size} entries for A and {C.size} for C"
            )
        return cls(A.reshape(n, n), C.reshape(p, n))


@dataclass(frozen=True, eq=False)
class ObservabilityMatrix:
    """Stacked map from the window-initial state to the window's outputs.

    Rows are ordered time-major over the sensors in `index_set`.
    """

    O: np.ndarray
    T: int
    index_set: tuple

    def __post_init__(self):
        object.__setattr__(self, "O", _frozen(self.O))
        object.__setattr__(self, "index_set", tuple(self.index_set))
        if self.O.shape[0] != self.T * len(self.index_set):
            raise ValueError("row count must equal T * |index_set|")

    @property
    def n(self):
        return self.O.shape[1]

    def block(self, t):
        k = len(self.index_set)
        return self.O[t * k:(t + 1) * k]


@dataclass(frozen=True, eq=False)
class StackedWindow:
    """``T`` consecutive measurements of ``p`` sensors, stacked time-major.

    `x0`, `attack` and `noise_bounds` are filled in for simulated windows.
    """

    Y: np.ndarray
    T: int
    p: int
    x0: Optional[np.ndarray] = None
    attack: Optional[object] = None
    noise_bounds: Optional[np.ndarray] = None
    noise: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        check_positive_int(self.T, "T")
        check_positive_int(self.p, "p")
        Y = check_vector(self.Y, "Y", self.T * self.p)
        object.__setattr__(self, "Y", _frozen(Y))
        for name in ("x0", "noise_bounds", "noise"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _frozen(value))

    @classmethod
    def from_measurements(cls, y, **kwargs):
        """Build a window from a ``(T, p)`` array whose rows are ``y(t)``."""
        y = check_matrix(y, "y")
        return cls(y.ravel(), T=y.shape[0], p=y.shape[1], **kwargs)

    def per_sensor(self, i):
        return self.Y[i::self.p]

    def as_matrix(self):
        return self.Y.reshape(self.T, self.p)


def build_observability(system, T):
    """Return ``[C; CA; ...; CA^(T-1)]`` over all sensors."""
    T = check_positive_int(T, "T")
    blocks = []
    block = system.C
    for _ in range(T):
        blocks.append(block)
        block = block @ system.A
    return ObservabilityMatrix(np.vstack(blocks), T, tuple(range(system.p)))


def _row_positions(index_set, T, subset):
    width = len(index_set)
    position = {sensor: k for k, sensor in enumerate(index_set)}
    local = np.array([position[i] for i in subset], dtype=int)
    return (np.arange(T)[:, None] * width + local[None, :]).ravel()


def restrict(obs, index_set):
    """Keep, inside every time block, only the rows of sensors in `index_set`."""
    subset = tuple(sorted({int(i) for i in index_set}))
    missing = set(subset) - set(obs.index_set)
    if missing:
        raise SensorIndexError(
            f"sensor indices {sorted(missing)} not in index set {obs.index_set}"
        )
    rows = _row_positions(obs.index_set, obs.T, subset)
    return ObservabilityMatrix(obs.O[rows].reshape(len(rows), obs.n), obs.T, subset)


def stack_rows(T, p, index_set):
    """Row indices of the stacked vector selected by `index_set`, time-major."""
    subset = check_index_set(index_set, p)
    return _row_positions(tuple(range(p)), T, subset)


def stack_and_restrict(window, index_set):
    """Return ``Y_I``, ordered consistently with :func:`restrict`."""
    return window.Y[stack_rows(window.T, window.p, index_set)]


def numerical_rank(M, rtol=DEFAULT_RANK_RTOL):
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    tol = max(rtol, max(M.shape) * np.finfo(float).eps) * s[0]
    return int(np.count_nonzero(s > tol))


def is_sparse_observable(system, k, T=None, rtol=DEFAULT_RANK_RTOL):
    """True iff the system stays observable after removing any `k` sensors."""
    T = system.n if T is None else check_positive_int(T, "T")
    k = check_positive_int(k, "k", minimum=0)
    p, n = system.p, system.n
    if k > p:
        raise ValueError(f"cannot remove {k} of {p} sensors")
    if T * (p - k) < n:
        return False
    full = build_observability(system, T)
    for kept in combinations(range(p), p - k):
        if numerical_rank(restrict(full, kept).O, rtol) < n:
            return False
    return True


def max_allowable_attacks(system, T=None, rtol=DEFAULT_RANK_RTOL):
    """Largest ``s_bar <= ceil(p/2) - 1`` with 2*s_bar-sparse observability.

    Returns 0 when the system tolerates no attacked sensor (including the
    case where it is not observable at all).
    """
    s_bar = 0
    for candidate in range(1, max_attack_cap(system.p) + 1):
        if not is_sparse_observable(system, 2 * candidate, T, rtol):
            break
        s_bar = candidate
    return s_bar
