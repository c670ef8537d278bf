import pytest

from rmtesff import RngStream

_REPORT_KEY = pytest.StashKey[list]()


@pytest.fixture
def gen():
    return RngStream(20231017, 0).generator()


@pytest.fixture(scope="session")
def acceptance_report(pytestconfig):
    """List collecting one line per acceptance criterion, echoed in the summary."""
    return pytestconfig.stash.setdefault(_REPORT_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_REPORT_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
