"""Shared pytest hooks.

The acceptance tests record one verdict line per criterion; replaying them in
the terminal summary keeps them visible even though pytest captures stdout.
"""

_acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
