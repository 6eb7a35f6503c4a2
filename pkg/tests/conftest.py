"""Prints the acceptance scorecard after the run."""

import support


def pytest_terminal_summary(terminalreporter):
    if support.ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in support.ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
