from __future__ import annotations

import re

import pytest

from blasiuscert.quasi import build_inner

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_outcomes: dict[int, str] = {}


@pytest.fixture(scope="session")
def inner():
    return build_inner()


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        if report.failed:
            _outcomes[n] = "FAIL"
        elif report.skipped:
            _outcomes.setdefault(n, "SKIP")
        else:
            _outcomes.setdefault(n, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        terminalreporter.write_line(f"criterion {n:2d}: {_outcomes[n]}")
