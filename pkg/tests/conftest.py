"""Reports one PASS/FAIL line per acceptance criterion at the end of the run."""

_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    number, title = crit
    failed = report.failed or (report.when == "call" and report.skipped)
    prev = _results.get(number, (title, "PASS"))[1]
    if report.when == "call" or failed:
        _results[number] = (title, "FAIL" if failed or prev == "FAIL" else "PASS")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", tuple(mark.args)))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        title, status = _results[number]
        terminalreporter.write_line(f"criterion {number} [{status}] {title}")
