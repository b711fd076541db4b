import numpy as np
import pytest

from isodyn.lattice import LatticeSpec

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def lat():
    """Small grid for unit tests: 8x8x9 spatial, 8^2 inner."""
    return LatticeSpec(n1=8, n2=8, n3=9, k_inner=8)


@pytest.fixture(scope="session")
def lat3():
    """D = 3 grid, tiny, to keep dimension-generic code honest."""
    return LatticeSpec(n1=4, n2=4, n3=5, d_inner=3, k_inner=4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
