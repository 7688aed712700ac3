import pytest

from converse2.forms import load_form

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def delta():
    return load_form("delta", 10_000)


@pytest.fixture(scope="session")
def level11():
    return load_form("level11", 10_000)


@pytest.fixture(scope="session")
def eis15():
    return load_form("eis15", 10_000)


@pytest.fixture(scope="session")
def eis35():
    return load_form("eis35", 10_000)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
