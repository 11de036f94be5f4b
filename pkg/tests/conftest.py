import re

_ACCEPTANCE = re.compile(r"test_acceptance\.py::test_ac(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, whatever the capture mode.

    The measurement printed by each acceptance test is appended when the
    captured output is available.
    """
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call" and outcome != "error":
                continue
            match = _ACCEPTANCE.search(report.nodeid)
            if not match:
                continue
            number, name = match.groups()
            status = "PASS" if outcome == "passed" else "FAIL"
            detail = ""
            for line in getattr(report, "capstdout", "").splitlines():
                if line.startswith("AC"):
                    detail = line.split("  ", 1)[-1]
            lines.append((int(number), name.replace("_", " "), status, detail))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, status, detail in sorted(lines):
        terminalreporter.write_line(f"AC{number:<3d}{status}  {name}" + (f" | {detail}" if detail else ""))
