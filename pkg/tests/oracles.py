"""Reference computations written independently of the package internals.

They favour the most literal formulation (explicit powers, inverses, full
enumeration) over speed, and are used to derive or cross-check test values.
"""

from itertools import combinations
from math import comb

import numpy as np


def literal_observability(A, C, T):
    """O stacked time-major: rows t*p .. t*p+p-1 hold C A^t."""
    return np.vstack([C @ np.linalg.matrix_power(A, t) for t in range(T)])


def sensor_rows(T, p, sensors):
    return [t * p + i for t in range(T) for i in sorted(sensors)]


def pinv_residual(Y, O):
    """Residual and minimum-norm minimiser through the pseudo-inverse."""
    if O.shape[0] == 0:
        return 0.0, np.zeros(O.shape[1])
    x = np.linalg.pinv(O) @ Y
    return float(np.linalg.norm(Y - O @ x)), x


def exhaustive_delta(A, C, s_bar, T):
    """max over Gamma inside I, |Gamma| <= s_bar, |I| >= p - s_bar, of the
    top eigenvalue of inv(sum_I G_i) @ sum_Gamma G_i."""
    p, n = C.shape
    O = literal_observability(A, C, T)
    grams = []
    for i in range(p):
        O_i = O[sensor_rows(T, p, [i])]
        grams.append(O_i.T @ O_i)
    best = 0.0
    for size in range(p - s_bar, p + 1):
        for kept in combinations(range(p), size):
            inv = np.linalg.inv(sum(grams[i] for i in kept))
            for g in range(1, s_bar + 1):
                for gamma in combinations(kept, g):
                    num = sum(grams[i] for i in gamma)
                    best = max(best, float(np.max(np.linalg.eigvals(inv @ num).real)))
    return best


def literal_n_upper(p, s_bar, s):
    S = p - 2 * s_bar
    total = p
    for i in range(1, S + 1):
        total += comb(s, i) * comb(s_bar + S - s, S - i) * (s_bar + S)
    return total


def literal_min_support(Y, A, C, T, bounds, epsilon, s_max):
    """Smallest supports b (|b| <= s_max) whose complement fits the data."""
    p = C.shape[0]
    O = literal_observability(A, C, T)
    bounds = np.zeros(p) if bounds is None else np.asarray(bounds)
    for size in range(s_max + 1):
        found = []
        for support in combinations(range(p), size):
            kept = [i for i in range(p) if i not in support]
            rows = sensor_rows(T, p, kept)
            r, _ = pinv_residual(Y[rows], O[rows])
            if r < np.sqrt(np.sum(bounds[kept] ** 2)) + np.sqrt(epsilon):
                found.append(support)
        if found:
            return found
    return []


# node labels per row of the four-sensor worked example: (frontier, explored, repo), frontier
# and repo in priority order
TABLE = [
    ([0], [], []),
    ([1, 6], [0], []),
    ([3, 6], [0, 1], []),
    ([6, 5], [0, 1, 3], []),
    ([7, 5], [0, 1, 3, 6], [8]),
    ([9, 5], [0, 1, 3, 6, 7], [10, 8]),
    ([11, 12, 5], [0, 1, 3, 6, 7, 9], [10, 8]),
    ([12, 5], [0, 1, 3, 6, 7, 9, 11], [10, 8]),
]


def isomorphic(trace, table):
    """True if one relabeling maps every row of `trace` onto `table`."""
    if len(trace) != len(table):
        return False
    forward, backward = {}, {}
    for row, expected in zip(trace, table):
        for ours, theirs in zip((row.frontier, row.explored, row.repo), expected):
            if len(ours) != len(theirs):
                return False
            for key, label in zip(ours, theirs):
                if forward.setdefault(key, label) != label:
                    return False
                if backward.setdefault(label, key) != key:
                    return False
    return True
