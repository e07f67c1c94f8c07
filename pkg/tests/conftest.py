import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dtlab.dynamics.sampler import random_regular_point, task_rng

settings.register_profile("dtlab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dtlab")


def regular_points(count, sizes=(4, 5, 6, 7), seed=1234):
    return [random_regular_point(sizes[t % len(sizes)], task_rng(seed, t)) for t in range(count)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def point5():
    return random_regular_point(5, task_rng(7, 0))


TWO_PI = 2 * math.pi


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
