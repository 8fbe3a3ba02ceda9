import numpy as np
import pytest

from securestate.fixtures import four_sensor_example
from securestate.scenario import random_sparse_system


@pytest.fixture
def example():
    return four_sensor_example()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_system():
    return random_sparse_system(3, 5, density=0.8, seed=7)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
