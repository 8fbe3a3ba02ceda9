"""Exhaustive enumeration of attack supports, used to certify the search."""

from dataclasses import dataclass, field
from itertools import combinations

from ._validation import check_epsilon, check_noise_bounds, check_positive_int
from .residual import DEFAULT_EPSILON, combine_noise_bound, is_feasible
from .system import build_observability, stack_rows

MAX_ORACLE_SENSORS = 20


@dataclass
class OracleReport:
    minimal_supports: list
    all_feasible: list = field(default=None)
    cardinality_checked: int = 0

    @property
    def min_cardinality(self):
        """Size of the smallest feasible support, or None if none exists."""
        return len(self.minimal_supports[0]) if self.minimal_supports else None

    def to_dict(self):
        return {
            "minimal_supports": [list(b) for b in self.minimal_supports],
            "all_feasible": None if self.all_feasible is None
            else [list(b) for b in self.all_feasible],
            "cardinality_checked": self.cardinality_checked,
        }


def _support_checker(window, system, noise_bounds, epsilon):
    if window.p != system.p:
        raise ValueError(f"window has {window.p} sensors, system has {system.p}")
    p = system.p
    if p > MAX_ORACLE_SENSORS:
        raise ValueError(f"oracle refuses p={p} > {MAX_ORACLE_SENSORS}")
    bounds = check_noise_bounds(noise_bounds, p)
    epsilon = check_epsilon(epsilon)
    O = build_observability(system, window.T).O

    def feasible(support):
        kept = [i for i in range(p) if i not in support]
        rows = stack_rows(window.T, p, kept)
        return is_feasible(window.Y[rows], O[rows], combine_noise_bound(bounds, kept), epsilon)

    return feasible


def brute_force_min_support(window, system, noise_bounds=None, epsilon=DEFAULT_EPSILON,
                            s_bar=0, list_all=False):
    """Enumerate supports by increasing size up to `s_bar`.

    Returns every feasible support of the smallest feasible size
    (lexicographic order). With `list_all`, every feasible support of size
    at most `s_bar` is listed too.
    """
    s_bar = check_positive_int(s_bar, "s_bar", minimum=0)
    feasible = _support_checker(window, system, noise_bounds, epsilon)
    p = system.p
    minimal = []
    every = [] if list_all else None
    checked = 0
    for size in range(min(s_bar, p) + 1):
        checked = size
        found = [b for b in combinations(range(p), size) if feasible(b)]
        if found and not minimal:
            minimal = found
            if not list_all:
                break
        if list_all:
            every.extend(found)
    return OracleReport(minimal, every, checked)


def feasible_superset_check(window, system, noise_bounds=None, epsilon=DEFAULT_EPSILON,
                            s_bar=0, true_support=()):
    """True iff every feasible support of size <= `s_bar` contains `true_support`."""
    report = brute_force_min_support(window, system, noise_bounds, epsilon, s_bar, list_all=True)
    truth = set(true_support)
    return all(truth <= set(b) for b in report.all_feasible)
