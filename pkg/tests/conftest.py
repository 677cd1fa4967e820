import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance verdict lines after the run.

    The acceptance tests print one PASS/FAIL line per criterion, but
    pytest captures stdout of passing tests; this repeats the lines
    where they are always visible.
    """
    module = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance"
    )
    lines = getattr(module, "SESSION_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
