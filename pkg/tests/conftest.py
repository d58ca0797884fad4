import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report(capsys):
    """Record a criterion line; it is echoed immediately and again in the terminal summary."""

    def report(line: str) -> None:
        _ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
