import os
import sys

sys.path.insert(0, os.path.dirname(__file__))


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed", "xfailed", "xpassed"):
        for rep in terminalreporter.stats.get(key, []):
            lines += [v for k, v in getattr(rep, "user_properties", ()) if k == "criterion_line"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda t: int(t.split()[2])):
            terminalreporter.write_line(line)
