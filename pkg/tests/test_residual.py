import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from securestate.residual import (
    DEFAULT_EPSILON, combine_noise_bound, estimate_epsilon_star, is_feasible, min_residual,
)
from securestate.scenario import random_sparse_system, simulate_window
from securestate.system import build_observability, restrict, stack_and_restrict

from oracles import pinv_residual


def test_consistent_full_rank(rng):
    O = rng.standard_normal((8, 3))
    x = rng.standard_normal(3)
    result = min_residual(O @ x, O)
    assert result.residual <= 1e-9 * np.linalg.norm(O @ x)
    np.testing.assert_allclose(result.x_hat, x, rtol=1e-10)
    assert result.rank == 3


def test_hand_least_squares():
    # x = mean(0, 2) = 1, residual = ||(-1, 1)|| = sqrt(2)
    result = min_residual(np.array([0.0, 2.0]), np.array([[1.0], [1.0]]))
    assert result.residual == pytest.approx(np.sqrt(2.0), rel=1e-12)
    assert result.x_hat[0] == pytest.approx(1.0, rel=1e-12)


def test_empty_rows():
    result = min_residual(np.zeros(0), np.zeros((0, 4)))
    assert result.residual == 0.0
    np.testing.assert_array_equal(result.x_hat, np.zeros(4))


def test_rank_deficient_gives_minimum_norm(rng):
    O = np.hstack([rng.standard_normal((6, 2))] * 2)
    Y = rng.standard_normal(6)
    result = min_residual(Y, O)
    r, x = pinv_residual(Y, O)
    assert result.rank == 2
    assert result.residual == pytest.approx(r, rel=1e-9)
    np.testing.assert_allclose(result.x_hat, x, rtol=1e-8, atol=1e-12)


def test_accepts_observability_matrix(small_system, rng):
    obs = build_observability(small_system, 2)
    x = rng.standard_normal(3)
    assert min_residual(obs.O @ x, obs).residual < 1e-12


def test_shape_mismatch():
    with pytest.raises(ValueError):
        min_residual(np.zeros(3), np.zeros((4, 2)))


@settings(max_examples=60, deadline=None)
@given(m=st.integers(1, 12), n=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_matches_pseudo_inverse(m, n, seed):
    rng = np.random.default_rng(seed)
    O, Y = rng.standard_normal((m, n)), rng.standard_normal(m)
    r, _ = pinv_residual(Y, O)
    assert min_residual(Y, O).residual == pytest.approx(r, rel=1e-8, abs=1e-10)


def test_feasible_on_attack_free_sensors(small_system, rng):
    window = simulate_window(small_system, rng.uniform(-1, 1, 3), 3)
    obs = build_observability(small_system, 3)
    for kept in ([0], [1, 2], [0, 1, 2, 3, 4]):
        assert is_feasible(stack_and_restrict(window, kept), restrict(obs, kept), 0.0,
                           DEFAULT_EPSILON)


def test_example_attacked_pair_is_infeasible(example):
    system, window = example
    obs = build_observability(system, 2)
    assert not is_feasible(stack_and_restrict(window, [0, 1]), restrict(obs, [0, 1]), 0.0)
    assert is_feasible(stack_and_restrict(window, [1, 2, 3]), restrict(obs, [1, 2, 3]), 0.0)


def test_strict_inequality():
    O, Y = np.array([[1.0], [1.0]]), np.array([0.0, 2.0])
    assert not is_feasible(Y, O, 0.0, 0.0)
    # residual == bound exactly is rejected
    assert not is_feasible(Y, O, np.sqrt(2.0), 0.0)
    assert is_feasible(Y, O, np.sqrt(2.0), 1e-12)
    assert is_feasible(np.zeros(0), np.zeros((0, 1)), 0.0, 1e-12)
    assert not is_feasible(np.zeros(0), np.zeros((0, 1)), 0.0, 0.0)


def test_combine_noise_bound(rng):
    assert combine_noise_bound([1.0, 2.0], []) == 0.0
    assert combine_noise_bound([3.0, 4.0], [0, 1]) == pytest.approx(5.0)
    bounds = rng.uniform(0, 1, 6)
    assert combine_noise_bound(bounds, range(6)) == pytest.approx(np.linalg.norm(bounds))
    with pytest.raises(ValueError):
        combine_noise_bound([-1.0], [0])


def test_epsilon_star():
    system = random_sparse_system(4, 6, 0.5, seed=3)
    assert estimate_epsilon_star(system, sample_count=1, states=np.zeros((1, 4))) == 0.0
    for seed in range(5):
        system = random_sparse_system(10, 10, 0.3, seed=seed)
        value = estimate_epsilon_star(system, sample_count=50, seed=seed)
        assert value < 1e-20
        assert value < DEFAULT_EPSILON
