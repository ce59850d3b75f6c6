"""Shared pytest wiring for the acceptance suite.

The acceptance tests record one verdict line apiece; this hook prints
them together at the end of the run so the pass/fail status of every
criterion is visible in one block.
"""

_ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
