import random

import pytest

from jetvar.jetring import JetSpace

# lines printed by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def S11():
    return JetSpace(1, 1)


@pytest.fixture
def S21():
    return JetSpace(2, 1)


@pytest.fixture
def S22():
    return JetSpace(2, 2)
