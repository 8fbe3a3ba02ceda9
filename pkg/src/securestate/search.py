"""Best-first search over sensor attack assignments.

The search walks a layered graph with one level per sensor and two nodes per
level (attacked / attack-free). Nodes carry the set of sensors assigned
attack-free so far; a node is extended only while the least-squares fit of
those sensors stays within the noise budget.

Three collections drive it:

* ``frontier`` -- priority queue of nodes eligible for expansion;
* ``explored`` -- nodes already expanded since the last restart;
* ``repo`` -- priority queue of nodes whose (level, value) class was already
  present in ``frontier`` or ``explored`` when they were generated. They are
  only pulled back once ``frontier`` runs dry, which also clears ``explored``.

Priority: fewer attacked sensors first, then deeper level, then FIFO.
"""

import enum
import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import (
    check_epsilon,
    check_noise_bounds,
    check_positive_int,
)
from .residual import DEFAULT_EPSILON, min_residual
from .system import build_observability, stack_rows


class SearchMode(str, enum.Enum):
    """How the attacked-count cap is applied to generated children.

    ``EXACT`` discards children with more than ``s_bar`` attacked sensors.
    ``HALF_P`` discards children with at least ``ceil(p/2)`` attacked sensors
    and is meant for plants whose ``s_bar`` is too costly to compute.
    """

    EXACT = "exact"
    HALF_P = "halfp"


class Status(str, enum.Enum):
    SOLVED = "solved"
    FAILURE = "failure"


@dataclass(frozen=True, eq=False)
class SearchNode:
    """One vertex of the assignment graph.

    ``level`` 0 is the artificial root; level ``l`` assigns sensor ``l - 1``.
    ``attack_free`` holds the sensor indices assigned 0 along the path and
    ``residual`` is 1 when their fit exceeded the budget.
    """

    level: int
    value: int
    parent: Optional["SearchNode"]
    attack_free: frozenset
    residual: int
    uid: int = field(default=0, compare=False)

    @property
    def attacked_count(self):
        return self.level - len(self.attack_free)

    @property
    def key(self):
        """Identity of the partial assignment: ``(level, value, I)``."""
        return (self.level, self.value, tuple(sorted(self.attack_free)))

    @property
    def eq_class(self):
        return (self.level, self.value)

    def assignment(self):
        """Return the 0/1 attack flags of sensors ``0..level-1``."""
        return [0 if i in self.attack_free else 1 for i in range(self.level)]


def root_node():
    return SearchNode(level=0, value=1, parent=None, attack_free=frozenset(), residual=0)


def node_equiv(v, w):
    """Same sensor and same Boolean value; the path set is ignored."""
    return v.level == w.level and v.value == w.value


def priority_key(v):
    """Sort key, smaller is served first."""
    return (v.attacked_count, -v.level)


def node_cmp(v, w):
    """Return 1 if `v` has higher priority than `w`, -1 if lower, 0 if tied."""
    kv, kw = priority_key(v), priority_key(w)
    if kv < kw:
        return 1
    if kv > kw:
        return -1
    return 0


class _PriorityQueue:
    """Heap ordered by :func:`priority_key` with FIFO tie-breaking."""

    def __init__(self, counter):
        self._heap = []
        self._counter = counter

    def put(self, node):
        heapq.heappush(self._heap, (priority_key(node), next(self._counter), node))

    def get(self):
        return heapq.heappop(self._heap)[2]

    def __len__(self):
        return len(self._heap)

    def ordered(self):
        return [entry[2] for entry in sorted(self._heap)]


@dataclass
class EstimationResult:
    x_hat: Optional[np.ndarray]
    attacked: tuple
    attack_free: tuple
    iterations: int
    status: Status
    runtime: float
    accepted: Optional[SearchNode] = None
    expanded: list = field(default_factory=list, repr=False)

    @property
    def solved(self):
        return self.status is Status.SOLVED

    def to_dict(self):
        return {
            "x_hat": None if self.x_hat is None else [float(v) for v in self.x_hat],
            "attacked": list(self.attacked),
            "attack_free": list(self.attack_free),
            "iterations": self.iterations,
            "status": self.status.value,
            "runtime_ms": 1e3 * self.runtime,
        }


@dataclass(frozen=True)
class TraceRow:
    """Snapshot of the three collections; nodes are listed by their keys.

    ``frontier`` and ``repo`` are in priority order, ``explored`` in
    insertion order. The final row of a solved run lists the accepted node at
    the end of ``explored``.
    """

    iteration: int
    frontier: tuple
    explored: tuple
    repo: tuple

    def to_dict(self):
        def fmt(nodes):
            return [{"level": l, "value": v, "attack_free": list(I)} for l, v, I in nodes]

        return {
            "iteration": self.iteration,
            "frontier": fmt(self.frontier),
            "explored": fmt(self.explored),
            "repo": fmt(self.repo),
        }


class _Problem:
    """Measurements and observability rows shared by every residual check."""

    def __init__(self, window, system, noise_bounds, epsilon):
        if window.p != system.p:
            raise ValueError(f"window has {window.p} sensors, system has {system.p}")
        self.p = system.p
        self.T = window.T
        self.Y = window.Y
        self.O = build_observability(system, window.T).O
        self.bounds_sq = check_noise_bounds(noise_bounds, system.p) ** 2
        self.sqrt_eps = np.sqrt(check_epsilon(epsilon))

    def fit(self, attack_free):
        rows = stack_rows(self.T, self.p, attack_free)
        return min_residual(self.Y[rows], self.O[rows])

    def budget(self, attack_free):
        w_bar = np.sqrt(sum(self.bounds_sq[i] for i in attack_free))
        return w_bar + self.sqrt_eps


def _extend(parent, value, problem, uid=0):
    if parent.level >= problem.p:
        raise ValueError("cannot extend a node at the last level")
    if value not in (0, 1):
        raise ValueError("value must be 0 or 1")
    level = parent.level + 1
    if value == 0:
        attack_free = parent.attack_free | {level - 1}
        fit = problem.fit(attack_free)
        residual = 0 if fit.residual < problem.budget(attack_free) else 1
    else:
        attack_free = parent.attack_free
        residual = parent.residual
    return SearchNode(level, value, parent, attack_free, residual, uid)


def get_child(parent, value, window, system, noise_bounds=None, epsilon=DEFAULT_EPSILON):
    """Extend `parent` by assigning the next sensor `value` (0 or 1).

    Assigning 0 adds the sensor to the attack-free set and re-checks the fit;
    assigning 1 keeps the set and inherits the parent's residual flag.
    """
    return _extend(parent, value, _Problem(window, system, noise_bounds, epsilon))


def _cap_exceeded(child, mode, s_bar, p):
    if mode is SearchMode.HALF_P:
        return child.attacked_count >= (p + 1) // 2
    return child.attacked_count > s_bar


def _run(window, system, noise_bounds, epsilon, s_bar, mode, trace):
    start = time.perf_counter()
    mode = SearchMode(mode)
    problem = _Problem(window, system, noise_bounds, epsilon)
    p = problem.p
    if mode is SearchMode.EXACT:
        if s_bar is None:
            raise ValueError("s_bar is required in exact mode")
        s_bar = check_positive_int(s_bar, "s_bar", minimum=0)

    uids = itertools.count()
    counter = itertools.count()
    frontier = _PriorityQueue(counter)
    repo = _PriorityQueue(counter)
    explored = []
    # frontier holds at most one node per (level, value) class
    frontier_classes = set()
    explored_classes = set()

    root = root_node()
    next(uids)
    frontier.put(root)
    frontier_classes.add(root.eq_class)
    iterations = 0
    expanded = []

    def snapshot(extra=None):
        explored_keys = [v.key for v in explored]
        if extra is not None:
            explored_keys.append(extra.key)
        trace.append(
            TraceRow(
                iteration=len(trace) + 1,
                frontier=tuple(v.key for v in frontier.ordered()),
                explored=tuple(explored_keys),
                repo=tuple(v.key for v in repo.ordered()),
            )
        )

    while True:
        if trace is not None:
            snapshot()
        if not frontier and not repo:
            return EstimationResult(
                None, (), (), iterations, Status.FAILURE,
                time.perf_counter() - start, None, expanded,
            )
        if not frontier:
            promoted = repo.get()
            frontier.put(promoted)
            frontier_classes = {promoted.eq_class}
            explored = []
            explored_classes = set()
        node = frontier.get()
        frontier_classes.discard(node.eq_class)
        iterations += 1
        expanded.append(node.key)

        if node.level == p:
            attack_free = tuple(sorted(node.attack_free))
            x_hat = problem.fit(attack_free).x_hat
            attacked = tuple(i for i in range(p) if i not in node.attack_free)
            if trace is not None:
                snapshot(extra=node)
            return EstimationResult(
                x_hat, attacked, attack_free, iterations, Status.SOLVED,
                time.perf_counter() - start, node, expanded,
            )

        explored.append(node)
        explored_classes.add(node.eq_class)
        for value in (0, 1):
            child = _extend(node, value, problem, next(uids))
            if child.residual:
                continue
            if _cap_exceeded(child, mode, s_bar, p):
                continue
            if child.eq_class in frontier_classes or child.eq_class in explored_classes:
                repo.put(child)
            else:
                frontier.put(child)
                frontier_classes.add(child.eq_class)


def secure_estimate(window, system, noise_bounds=None, epsilon=DEFAULT_EPSILON,
                    s_bar=None, mode=SearchMode.EXACT):
    """Identify the attacked sensors in `window` and reconstruct the state.

    Parameters
    ----------
    window : StackedWindow
        Stacked measurements of all ``p`` sensors.
    system : LtiSystem
    noise_bounds : array of shape (p,), optional
        Per-sensor bounds on the stacked noise norm; zeros if omitted.
    epsilon : float
        Solution accuracy; the fit budget of a sensor set ``I`` is
        ``w_bar_I + sqrt(epsilon)``.
    s_bar : int
        Maximum number of attacked sensors (ignored in ``halfp`` mode).
    mode : {"exact", "halfp"}

    Returns
    -------
    EstimationResult
        ``iterations`` counts nodes taken off the frontier. On failure
        ``x_hat`` is None and both sensor sets are empty.
    """
    return _run(window, system, noise_bounds, epsilon, s_bar, mode, trace=None)


def trace_search(window, system, noise_bounds=None, epsilon=DEFAULT_EPSILON,
                 s_bar=None, mode=SearchMode.EXACT):
    """Like :func:`secure_estimate`, also returning per-iteration snapshots.

    One row is recorded at the start of every loop pass; a solved run adds a
    closing row with the accepted node appended to ``explored``.
    """
    trace = []
    result = _run(window, system, noise_bounds, epsilon, s_bar, mode, trace=trace)
    return result, trace
