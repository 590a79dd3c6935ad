import pytest

# criterion number -> (title, outcome) filled in as acceptance tests run
_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(num, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    num, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        secs = getattr(rep, "duration", 0.0)
        _ACCEPTANCE[num] = (title, status, secs)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        title, status, secs = _ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {title}  ({secs:.1f} s)")
