import numpy as np
import pytest

from finsleroid import derive_params

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def p15():
    return derive_params(1.5)


@pytest.fixture
def R31():
    return np.array([3.0, 1.0, 0.0, 0.0])


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
