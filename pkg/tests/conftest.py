import os

import pytest

SLOW_ENV = "BIKEBF_SLOW"

_results: dict[str, tuple[str, str, list[str]]] = {}


def pytest_collection_modifyitems(config, items):
    if os.environ.get(SLOW_ENV) == "1":
        return
    skip = pytest.mark.skip(reason=f"slow; set {SLOW_ENV}=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    name, text = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.skipped):
        status = "PASS" if rep.passed else "SKIP" if rep.skipped else "FAIL"
        details = [str(v) for k, v in rep.user_properties if k == "detail"]
        _results[item.nodeid] = (f"{name} {status}: {text}", status, details)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for line, _, details in _results.values():
        terminalreporter.write_line(line)
        for d in details:
            terminalreporter.write_line(f"    {d}")
