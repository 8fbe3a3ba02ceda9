"""Attack-detectability threshold and worst-case iteration count."""

from dataclasses import asdict, dataclass
from itertools import combinations
from math import comb, sqrt
from typing import Optional

import numpy as np
from scipy import linalg

from ._validation import check_positive_int
from .system import build_observability, restrict

MAX_ENUMERATION_SENSORS = 16


class InsufficientObservabilityError(ValueError):
    """A sensor subset's Gram matrix is singular."""

    def __init__(self, index_set):
        self.index_set = tuple(index_set)
        super().__init__(
            f"sum of O_i^T O_i over sensors {self.index_set} is singular; "
            "the system is not sparse observable enough for this s_bar"
        )


class IntractableError(ValueError):
    pass


def sensor_grams(system, T):
    full = build_observability(system, T)
    grams = []
    for i in range(system.p):
        O_i = restrict(full, [i]).O
        grams.append(O_i.T @ O_i)
    return np.array(grams)


def delta_s(system, s_bar, T=None):
    """Largest generalised eigenvalue of ``(sum_Gamma G_i, sum_I G_i)``.

    ``G_i = O_i^T O_i``; the maximum runs over ``Gamma`` inside ``I`` with
    ``|Gamma| <= s_bar`` and ``|I| >= p - s_bar``. Enlarging ``Gamma`` or
    shrinking ``I`` can only raise the eigenvalue (both Gram sums are PSD),
    so only pairs with ``|I| = p - s_bar`` and ``|Gamma| = s_bar`` are
    visited. Singular ``sum_I G_i`` raises :class:`InsufficientObservabilityError`.
    """
    T = system.n if T is None else check_positive_int(T, "T")
    s_bar = check_positive_int(s_bar, "s_bar", minimum=0)
    p = system.p
    if p > MAX_ENUMERATION_SENSORS:
        raise IntractableError(
            f"delta_s enumerates sensor subsets and is combinatorially intractable "
            f"for p={p} > {MAX_ENUMERATION_SENSORS}"
        )
    if 2 * s_bar >= p:
        raise ValueError(f"s_bar={s_bar} must be below p/2 for p={p}")
    grams = sensor_grams(system, T)
    n = system.n
    best = 0.0
    for kept in combinations(range(p), p - s_bar):
        denominator = grams[list(kept)].sum(axis=0)
        try:
            linalg.cholesky(denominator)
        except linalg.LinAlgError:
            raise InsufficientObservabilityError(kept) from None
        for gamma in combinations(kept, s_bar):
            if not gamma:
                continue
            numerator = grams[list(gamma)].sum(axis=0)
            if n == 1:
                # a scalar pencil's eigenvalue is the plain ratio, no rounding via Cholesky
                top = numerator[0, 0] / denominator[0, 0]
            else:
                top = linalg.eigh(
                    numerator, denominator, eigvals_only=True, subset_by_index=[n - 1, n - 1]
                )[0]
            best = max(best, float(top))
    return best


def attack_threshold(delta, w_bar, epsilon):
    """Per-sensor attack norm above which the attack cannot hide.

    ``(2 w_bar + sqrt(epsilon)) / sqrt(1 - delta)``, with `w_bar` the
    all-sensor noise bound.
    """
    if delta >= 1:
        raise ValueError(f"threshold undefined for delta_s={delta} >= 1")
    if w_bar < 0 or epsilon < 0:
        raise ValueError("w_bar and epsilon must be non-negative")
    scale = sqrt(1.0 - delta)
    return 2.0 * w_bar / scale + sqrt(epsilon) / scale


def n_upper(p, s_bar, s):
    """Worst-case number of node expansions before the true assignment is found.

    ``sum_{i=1}^{S} C(s, i) C(s_bar + S - s, S - i) (s_bar + S) + p`` with
    ``S = p - 2 s_bar``; binomials with a top below the bottom vanish.
    """
    p = check_positive_int(p, "p")
    s_bar = check_positive_int(s_bar, "s_bar", minimum=0)
    s = check_positive_int(s, "s", minimum=0)
    S = p - 2 * s_bar
    top = s_bar + S - s
    if top < 0:
        return p
    # C(s, i) vanishes for i > s and C(top, S - i) for i < S - top
    total = 0
    for i in range(max(1, S - top), min(S, s) + 1):
        total += comb(s, i) * comb(top, S - i)
    return total * (s_bar + S) + p


@dataclass
class BoundReport:
    p: int
    n: int
    T: int
    s_bar: int
    s: int
    n_upper: int
    delta_s: Optional[float] = None
    threshold: Optional[float] = None
    coefficient: Optional[float] = None
    note: Optional[str] = None

    def to_dict(self):
        return asdict(self)


def bound_report(system, s_bar, s, T=None, w_bar=0.0, epsilon=1e-5):
    """Collect the bounds for one plant; falls back to ``n_upper`` only when
    ``delta_s`` cannot be enumerated."""
    T = system.n if T is None else T
    report = BoundReport(system.p, system.n, T, s_bar, s, n_upper(system.p, s_bar, s))
    try:
        d = delta_s(system, s_bar, T)
    except (IntractableError, InsufficientObservabilityError, ValueError) as exc:
        report.note = str(exc)
        return report
    report.delta_s = d
    if d < 1:
        report.threshold = attack_threshold(d, w_bar, epsilon)
        report.coefficient = 2.0 / sqrt(1.0 - d)
    else:
        report.note = "delta_s >= 1: no finite attack threshold"
    return report
