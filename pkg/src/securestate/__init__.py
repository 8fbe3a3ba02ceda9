"""Secure state estimation for linear plants with attacked sensors."""

from .bounds import bound_report, delta_s, attack_threshold, n_upper
from .estimator import SecureStateEstimator
from .oracle import brute_force_min_support, feasible_superset_check
from .residual import DEFAULT_EPSILON, is_feasible, min_residual
from .scenario import (
    AttackScenario, AttackScheme, NoiseModel, generate_attack, noise_bounds,
    random_sparse_system, simulate_window,
)
from .search import (
    EstimationResult, SearchMode, SearchNode, Status, get_child, node_cmp,
    secure_estimate, trace_search,
)
from .system import (
    LtiSystem, ObservabilityMatrix, StackedWindow, build_observability,
    is_sparse_observable, max_allowable_attacks, restrict,
)

__version__ = "0.1.0"
