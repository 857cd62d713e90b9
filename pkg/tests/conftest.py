import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from posconv import LatticeSpace

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
nonneg = st.floats(0, 5, allow_nan=False, allow_infinity=False)


def vectors(n, elements=finite):
    return arrays(np.float64, n, elements=elements)


def random_stochastic(rng, n, density=1.0):
    """Column-stochastic matrix with a strictly positive random part."""
    A = rng.random((n, n)) * (rng.random((n, n)) < density)
    A += np.eye(n) * 1e-3
    return A / A.sum(axis=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def l1_3():
    return LatticeSpace(("a", "b", "c"))


# acceptance criteria outcomes, printed in the terminal summary
ACCEPTANCE = {}


def record_criterion(number, title, passed):
    ACCEPTANCE[number] = (title, passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}")
