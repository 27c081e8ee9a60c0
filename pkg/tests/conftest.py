import pytest

from mdlvq.lattice import make_lattice
from mdlvq.rings import GaussianInt
from mdlvq.sublattice import build_system

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def worked_system():
    """Z^2 with multipliers 2+i and 3 (indices 5 and 9)."""
    return build_system(make_lattice("Zn", 2), GaussianInt(2, 1), GaussianInt(3, 0))


@pytest.fixture(scope="session")
def line_system():
    """Z with multipliers 3 and 5."""
    return build_system(make_lattice("Zn", 1), 3, 5)
