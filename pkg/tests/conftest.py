import re

_CRITERIA: dict[int, list] = {}
_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m:
        return
    entry = _CRITERIA.setdefault(int(m.group(1)), [m.group(2), True, 0.0])
    if report.when == "call":
        entry[2] += report.duration
    if report.failed:
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        name, ok, secs = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n} {name.replace('_', ' ')}: {'PASS' if ok else 'FAIL'} ({secs:.2f}s)")
