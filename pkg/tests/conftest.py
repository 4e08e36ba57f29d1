"""Collects PASS/FAIL lines for tests marked ``criterion`` and prints them at the end."""

_TITLES = {}
_LINES = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _TITLES[item.nodeid] = mark.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _TITLES:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = _TITLES[report.nodeid]
        detail = dict(report.user_properties).get("detail", "")
        status = "PASS" if report.passed else "FAIL"
        _LINES[number] = f"[{status}] criterion {number:2d}: {title}" + (f" -- {detail}" if detail else "")


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_LINES):
        terminalreporter.write_line(_LINES[number])
