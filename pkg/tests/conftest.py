import pytest

from quasiloc.arithmetic import golden
from quasiloc.localization import harvest_energy
from quasiloc.model import amo


@pytest.fixture(scope="session")
def gold():
    return golden(30)


@pytest.fixture(scope="session")
def amo2():
    return amo(2.0)


@pytest.fixture(scope="session")
def E_mid(gold, amo2):
    return harvest_energy(amo2, gold, 0.1, 1000)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
