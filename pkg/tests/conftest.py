"""Shared test plumbing: collect acceptance verdict lines for the summary."""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance checklist")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
