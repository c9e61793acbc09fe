import pytest

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = getattr(item, "acceptance_detail", "")
        previous = _CRITERIA.get(number)
        passed = report.passed and (previous is None or previous[0])
        _CRITERIA[number] = (passed, detail or (previous[1] if previous else ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)


@pytest.fixture
def report(request):
    """Attach a one-line measurement to the acceptance summary."""

    def record(text):
        request.node.acceptance_detail = text

    return record
