import numpy as np
import pytest
from scipy import stats

from securestate.scenario import (
    AttackScenario, AttackScheme, NoiseModel, generate_attack, noise_bound_for, noise_bounds,
    random_sparse_system, simulate_window,
)
from securestate.system import LtiSystem, build_observability, restrict

from oracles import literal_observability


def test_dense_system_entries():
    system = random_sparse_system(5, 7, density=1.0, seed=1, max_spectral_radius=None)
    assert np.all(system.A > 0) and np.all(system.C > 0)
    assert np.all(system.A <= 1) and np.all(system.C <= 1)


def test_sparsity_level():
    system = random_sparse_system(40, 40, density=0.3, seed=2)
    assert 0.25 < np.mean(system.C != 0) < 0.35


def test_spectral_radius_cap():
    system = random_sparse_system(20, 5, density=0.5, seed=4)
    assert np.max(np.abs(np.linalg.eigvals(system.A))) <= 1.0 + 1e-12


def test_same_seed_same_system():
    a = random_sparse_system(6, 6, seed=99)
    b = random_sparse_system(6, 6, seed=99)
    assert a.A.tobytes() == b.A.tobytes() and a.C.tobytes() == b.C.tobytes()


def test_bad_density():
    with pytest.raises(ValueError):
        random_sparse_system(3, 3, density=0.0)


def test_greedy_first_sensor():
    attack = generate_attack("greedy", 4, 1, 2.0, 3, seed=0)
    assert attack.support == (0,)
    assert attack.scheme is AttackScheme.GREEDY
    assert np.linalg.norm(attack.signals[0]) == pytest.approx(2.0)


def test_zero_magnitude_attack():
    attack = generate_attack("random", 6, 2, 0.0, 4, seed=1)
    assert len(attack.support) == 2
    assert all(np.all(s == 0) for s in attack.signals.values())


def test_random_support_frequency():
    counts = np.zeros(10)
    for seed in range(1000):
        counts[list(generate_attack("random", 10, 3, 1.0, 2, seed=seed).support)] += 1
    assert np.all(np.abs(counts / 1000 - 0.3) < 0.05)


def test_attack_cap():
    with pytest.raises(ValueError):
        generate_attack("greedy", 6, 3, 1.0, 2)


def test_attack_round_trip():
    attack = generate_attack("random", 8, 3, 1.5, 4, seed=5)
    again = AttackScenario.from_dict(attack.to_dict())
    assert again.support == attack.support
    np.testing.assert_array_equal(again.stacked(8), attack.stacked(8))


def test_noiseless_attack_free_window(small_system, rng):
    x0 = rng.uniform(-1, 1, 3)
    window = simulate_window(small_system, x0, 4)
    np.testing.assert_allclose(window.Y, literal_observability(small_system.A, small_system.C, 4)
                               @ x0, atol=1e-14)


def test_attack_enters_only_its_sensor(small_system, rng):
    x0 = rng.uniform(-1, 1, 3)
    attack = generate_attack("greedy", 5, 1, 3.0, 4, seed=2)
    window = simulate_window(small_system, x0, 4, attack=attack)
    obs = build_observability(small_system, 4)
    np.testing.assert_allclose(window.per_sensor(0), restrict(obs, [0]).O @ x0 + attack.signals[0],
                               atol=1e-14)
    for i in range(1, 5):
        np.testing.assert_allclose(window.per_sensor(i), restrict(obs, [i]).O @ x0, atol=1e-14)


def test_noise_bound_holds_over_seeds(small_system):
    model = NoiseModel("truncated_gaussian", sigma=0.01, k=2.0)
    obs = build_observability(small_system, 3)
    bounds = noise_bounds(model, small_system, 3)
    rng = np.random.default_rng(0)
    for seed in range(1000):
        x0 = rng.uniform(-1, 1, 3)
        window = simulate_window(small_system, x0, 3, noise=model, seed=seed)
        for i in range(5):
            deviation = window.per_sensor(i) - restrict(obs, [i]).O @ x0
            assert np.linalg.norm(deviation) <= bounds[i]
            np.testing.assert_allclose(deviation, window.noise[i::5], atol=1e-14)


def test_no_noise_bound():
    assert np.all(noise_bounds(NoiseModel(), random_sparse_system(3, 4, seed=0), 5) == 0)


def test_measurement_noise_only_without_dynamics():
    system = LtiSystem(np.zeros((3, 3)), np.eye(3))
    model = NoiseModel("truncated_gaussian", sigma=0.01 / 3, k=3.0, process_sigma=0.0)
    np.testing.assert_allclose(noise_bounds(model, system, 3), 0.01 * np.sqrt(3))
    assert noise_bound_for(model, system, 3, 1) == pytest.approx(0.01 * np.sqrt(3))


def test_process_noise_reaches_later_blocks():
    # with A = 0 the process noise drawn at t-1 still enters y(t) through C
    system = LtiSystem(np.zeros((3, 3)), np.eye(3))
    model = NoiseModel("truncated_gaussian", sigma=0.01 / 3, k=3.0)
    np.testing.assert_allclose(noise_bounds(model, system, 3), np.sqrt(0.01**2 + 2 * 0.02**2))


def test_bound_dominates_sampled_noise():
    rng = np.random.default_rng(11)
    A, C = rng.standard_normal((3, 3)) * 0.5, rng.standard_normal((3, 3))
    system = LtiSystem(A, C)
    k, sigma, T, N = 3.0, 0.01 / 3.0, 3, 100_000
    model = NoiseModel("truncated_gaussian", sigma=sigma, k=k)
    bounds = noise_bounds(model, system, T)
    w = stats.truncnorm.rvs(-k, k, scale=sigma, size=(N, T, 3), random_state=rng)
    v = stats.truncnorm.rvs(-k, k, scale=sigma, size=(N, T, 3), random_state=rng)
    total = w.copy()
    for t in range(T):
        for j in range(t):
            total[:, t] += v[:, j] @ (C @ np.linalg.matrix_power(A, t - 1 - j)).T
    realized = np.linalg.norm(total, axis=1)
    assert np.all(realized.max(axis=0) <= bounds)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel("laplace")
    with pytest.raises(ValueError):
        NoiseModel("truncated_gaussian", sigma=-1.0)
    model = NoiseModel("truncated_gaussian", sigma=0.2, k=2.0)
    assert NoiseModel.from_dict(model.to_dict()) == model
    assert model.process_sigma == 0.2
