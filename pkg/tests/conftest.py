import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from grf_homog.catalog import bi_invariant_group, mpq, su2

settings.register_profile(
    "default",
    max_examples=30,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def m21():
    return mpq(2, 1)


@pytest.fixture(scope="session")
def m11():
    return mpq(1, 1)


@pytest.fixture(scope="session")
def su2_model():
    return bi_invariant_group(su2())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def e(n, i):
    """1-based unit vector."""
    v = np.zeros(n)
    v[i - 1] = 1.0
    return v


SQRT2 = math.sqrt(2.0)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
