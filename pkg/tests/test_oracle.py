import numpy as np
import pytest

from securestate.bounds import attack_threshold, delta_s
from securestate.oracle import MAX_ORACLE_SENSORS, brute_force_min_support, feasible_superset_check
from securestate.scenario import generate_attack, random_sparse_system, simulate_window
from securestate.system import StackedWindow, max_allowable_attacks

from oracles import literal_min_support


def test_attack_free_window(small_system, rng):
    window = simulate_window(small_system, rng.uniform(-1, 1, 3), 3)
    report = brute_force_min_support(window, small_system, s_bar=2)
    assert report.minimal_supports == [()]
    assert report.min_cardinality == 0
    assert report.cardinality_checked == 0


def test_example_unique_support(example):
    system, window = example
    report = brute_force_min_support(window, system, s_bar=1)
    assert report.minimal_supports == [(0,)]
    assert report.to_dict()["minimal_supports"] == [[0]]


def test_infeasible_budget(example):
    system, window = example
    report = brute_force_min_support(window, system, s_bar=0)
    assert report.minimal_supports == [] and report.min_cardinality is None


def test_list_all(example):
    system, window = example
    report = brute_force_min_support(window, system, s_bar=2, list_all=True)
    assert report.minimal_supports == [(0,)]
    assert (0,) in report.all_feasible
    assert all(0 in b for b in report.all_feasible)
    assert report.cardinality_checked == 2


@pytest.mark.parametrize("seed", range(8))
def test_agrees_with_literal_enumeration(seed):
    rng = np.random.default_rng(seed)
    p, n = int(rng.integers(3, 8)), int(rng.integers(1, 4))
    system = random_sparse_system(n, p, 0.6, seed=seed)
    attack = generate_attack("random", p, int(rng.integers(0, (p + 1) // 2)), 0.3, n, seed=seed)
    window = simulate_window(system, rng.uniform(-1, 1, n), n, attack=attack)
    s_max = (p + 1) // 2 - 1
    report = brute_force_min_support(window, system, s_bar=s_max)
    assert report.minimal_supports == literal_min_support(
        window.Y, system.A, system.C, n, None, 1e-5, s_max)


def _desk_instance(magnitude_scale):
    system = random_sparse_system(10, 10, 0.3, seed=1)
    s_bar = max_allowable_attacks(system)
    threshold = attack_threshold(delta_s(system, s_bar), 0.0, 1e-5)
    attack = generate_attack("greedy", 10, s_bar, magnitude_scale * threshold, 10, seed=2)
    window = simulate_window(system, np.full(10, 0.3), 10, attack=attack)
    return system, window, s_bar


def test_sub_threshold_attack_can_hide():
    system, window, s_bar = _desk_instance(1e-3)
    report = brute_force_min_support(window, system, s_bar=s_bar)
    assert report.minimal_supports != [window.attack.support]
    assert not feasible_superset_check(window, system, s_bar=s_bar,
                                       true_support=window.attack.support)


def test_above_threshold_attack_is_unique():
    system, window, s_bar = _desk_instance(2.0)
    report = brute_force_min_support(window, system, s_bar=s_bar)
    assert report.minimal_supports == [window.attack.support]
    assert feasible_superset_check(window, system, s_bar=s_bar,
                                   true_support=window.attack.support)


def test_superset_check_trivial_and_zero_attack(small_system, rng):
    window = simulate_window(small_system, rng.uniform(-1, 1, 3), 3)
    assert feasible_superset_check(window, small_system, s_bar=2, true_support=())
    silent = generate_attack("greedy", 5, 1, 0.0, 3)
    window = simulate_window(small_system, rng.uniform(-1, 1, 3), 3, attack=silent)
    assert not feasible_superset_check(window, small_system, s_bar=2, true_support=(0,))


def test_guards(example):
    system, window = example
    with pytest.raises(ValueError):
        brute_force_min_support(StackedWindow(np.zeros(6), T=2, p=3), system)
    big = random_sparse_system(2, MAX_ORACLE_SENSORS + 1, seed=0)
    with pytest.raises(ValueError):
        brute_force_min_support(StackedWindow(np.zeros(2 * big.p), T=2, p=big.p), big)
