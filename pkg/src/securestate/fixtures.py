"""Hand-built plants with known search behaviour."""

import numpy as np

from .scenario import AttackScenario, AttackScheme, simulate_window
from .system import LtiSystem

# s_bar admitting two attacked sensors on a path, so duplicates reach the repo
EXAMPLE_S_BAR = 2


def four_sensor_example():
    """Four sensors, two states, window of two; sensor 0 is attacked.

    Every single sensor observes the full state (each ``O_i`` is square and
    invertible), so any attack-free set of sensors is consistent while any
    set of two or more sensors that contains sensor 0 is not. Noiseless.

    Returns ``(system, window)``.
    """
    A = np.array([[0.9, 0.4], [-0.3, 0.8]])
    C = np.array([[1.0, 0.2], [0.3, 1.0], [0.7, -0.5], [0.4, 0.6]])
    system = LtiSystem(A, C)
    x0 = np.array([0.5, -0.8])
    signal = np.array([1.0, -2.0])
    attack = AttackScenario(
        (0,), {0: signal}, AttackScheme.GREEDY, float(np.linalg.norm(signal)), T=2
    )
    return system, simulate_window(system, x0, 2, attack=attack)
