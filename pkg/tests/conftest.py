import sys

import pytest

from tbispec.core import ConditionSpace, Distribution, run_pipeline
from tbispec.exactfield import PolyExp

D = Distribution.delta
X = PolyExp.x()
E = PolyExp.exp


def cm_space():
    return ConditionSpace([D(0, 1), D(1, 1)])


def soliton_space():
    return ConditionSpace([D(1, 0) + D(-1, 0), D(2, 0) + D(0, 0)])


@pytest.fixture(scope="session")
def cm():
    return cm_space()


@pytest.fixture(scope="session")
def soliton():
    return soliton_space()


@pytest.fixture(scope="session")
def cm_data(cm):
    return run_pipeline(cm)


@pytest.fixture(scope="session")
def soliton_data(soliton):
    return run_pipeline(soliton)


@pytest.fixture(scope="session")
def cm_data_x3(cm):
    """Calogero-Moser with the multiplier that gives eigenvalue x^3."""
    return run_pipeline(cm, g=X * E(-1))


@pytest.fixture(scope="session")
def soliton_data_cosh2(soliton):
    one = PolyExp.const(1)
    return run_pipeline(soliton, g=E(-2) * (one + E(2)) ** 2)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[n])
