from __future__ import annotations

import pytest

_CRITERIA: dict[int, str] = {}
_OUTCOMES: dict[int, list[str]] = {}
_NODE_CRITERION: dict[str, int] = {}


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow optional checks")


def pytest_collection_modifyitems(config, items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            number, title = marker.args
            _CRITERIA[number] = title
            _NODE_CRITERION[item.nodeid] = number
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="slow optional check; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_runtest_logreport(report):
    number = _NODE_CRITERION.get(report.nodeid)
    if number is None:
        return
    if report.failed:
        _OUTCOMES.setdefault(number, []).append("failed")
    elif report.when == "call" and report.passed:
        _OUTCOMES.setdefault(number, []).append("passed")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        outcomes = _OUTCOMES.get(number, [])
        if not outcomes:
            status = "SKIP"
        elif "failed" in outcomes:
            status = "FAIL"
        else:
            status = "PASS"
        terminalreporter.write_line(f"{status} criterion {number}: {_CRITERIA[number]}")
