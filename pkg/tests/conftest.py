import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tvsampling import GftBasis, Grid

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SQ2 = np.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def hadamard2():
    # columns (1,1)/sqrt2 and (1,-1)/sqrt2
    return GftBasis(np.array([1.0, -1.0]), np.array([[1.0, 1.0], [1.0, -1.0]]) / SQ2)


def tone(grid: Grid, freq, phase=0.0, amp=1.0):
    return amp * np.cos(2 * np.pi * freq * grid.times + phase)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
