import numpy as np
import pytest

from diaghyp import core


@pytest.fixture
def unit_line():
    return core.make_grid(0.0, 1.0, 4)


@pytest.fixture
def unit_periodic():
    return core.make_grid(0.0, 1.0, 4, core.PERIODIC)


def field(values, grid, jump=None):
    return core.FieldSet(np.atleast_2d(values), grid, jump)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS, key=lambda k: int(k[1:])):
            terminalreporter.write_line(RESULTS[key])
