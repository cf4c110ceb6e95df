import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def criterion_report():
    """Collect one pass/fail line per acceptance criterion for the summary."""

    def _report(line: str) -> None:
        _ACCEPTANCE_LINES.append(line)

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
