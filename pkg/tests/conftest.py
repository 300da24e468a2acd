"""Collects acceptance outcomes and prints one verdict line per criterion."""

_verdicts = {}


def pytest_runtest_logreport(report):
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if not marker:
        return
    number, title = marker
    failed = report.failed
    if report.when == "call" or failed:
        prev = _verdicts.get(number, (title, True))[1]
        _verdicts[number] = (title, prev and not failed)


def pytest_runtest_setup(item):
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        item.user_properties.append(("criterion", (mark.kwargs["criterion"], mark.kwargs["title"])))


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_verdicts):
        title, ok = _verdicts[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title}")
