import math

import pytest

from slspec.core import constant, from_callables
from slspec.qtree import TreeSpec, tree_to_sl


@pytest.fixture(scope="session")
def free():
    return constant()


@pytest.fixture(scope="session")
def tree2():
    return tree_to_sl(TreeSpec.homogeneous(2, 1.0))


@pytest.fixture(scope="session")
def exp_r():
    return from_callables("1", "0", "exp(x)", 0.0, 60.0)


@pytest.fixture(scope="session")
def weid():
    return from_callables("1", "exp(-x)", "1")


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


SQRT24 = math.sqrt(24.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
