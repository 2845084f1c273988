"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""
import re

_RESULTS = {}
_NAME = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if not m or "test_acceptance.py" not in report.nodeid:
        return
    key = (int(m.group(1)), m.group(2).replace("_", " "))
    if report.when == "call" or report.failed or report.skipped:
        prev = _RESULTS.get(key, ("PASS", 0.0))
        status = "FAIL" if report.failed or prev[0] == "FAIL" else "SKIP" if report.skipped else "PASS"
        _RESULTS[key] = (status, prev[1] + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for (n, name), (status, secs) in sorted(_RESULTS.items()):
        tr.write_line(f"criterion {n} {name:<22} {status}  ({secs:.1f} s)")
