import numpy as np
import pytest

from polygram.hrep import HRep

GRID = [(d, P, N) for d in (1, 2, 3) for P in (1, 2, 3) for N in range(d, 7)]

_acceptance = []


def grid_case(i):
    """Trial ``i`` cycles through the (d, P, N) grid with seed ``i``."""
    d, P, N = GRID[i % len(GRID)]
    return d, N, P, i


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def scalar_complex():
    """d=1, P=1, N=2 with W = (2, -2) and R_0 = R_1 = [1, 0]."""
    return HRep(W=[[[2.0]], [[-2.0]]], R=[[[1.0, 0.0]], [[1.0, 0.0]]])


@pytest.fixture
def acceptance_report():
    def record(criterion, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
        _acceptance.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance:
            terminalreporter.write_line(line)
