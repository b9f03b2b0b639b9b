import pytest

from manometer import SystemParams, TruncatedBasis

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def canonical():
    return SystemParams.from_expansion(1e-3, 1e-3)


@pytest.fixture
def unit_params():
    return SystemParams(gas_mass=1.0, wall_mass=2.0, box_length=1.3, spring_constant=1.7)


@pytest.fixture
def small_basis():
    return TruncatedBasis(12, 6)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
