import numpy as np
import pytest

from capdrop.bifurcation import make_bifurcation_point
from capdrop.continuation import ContinuationConfig, continue_branch

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def short_cfg():
    # fixed step: every point sits at s = 0.01 * j
    return ContinuationConfig(N=64, ds_init=0.01, ds_max=0.01)


@pytest.fixture(scope="session")
def branch_21(short_cfg):
    """50 steps of the (m=2, k=1) branch, s in (0, 0.5]."""
    return continue_branch(make_bifurcation_point(2, 1, 64), 1, short_cfg, steps=50)
