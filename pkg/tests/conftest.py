import pytest

_criteria: dict[str, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion, summarised after the run")


def pytest_runtest_logreport(report):
    mark = getattr(report, "_criterion", None)
    if mark is None:
        return
    number, title = mark
    detail = dict(report.user_properties).get("detail", "")
    if report.when == "call" or report.outcome != "passed":
        if report.skipped:
            status = "SKIP"
            detail = report.longrepr[2] if isinstance(report.longrepr, tuple) else detail
        else:
            status = "PASS" if report.passed else "FAIL"
        if number not in _criteria or status != "PASS":
            _criteria[number] = (status, title, detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result()._criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria, key=int):
        status, title, detail = _criteria[number]
        line = f"{status}  {number}. {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
