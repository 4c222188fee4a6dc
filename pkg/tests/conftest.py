import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile("default")

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n = mark.args[0]
    detail = getattr(item, "criterion_detail", "")
    _CRITERIA[n] = ("PASS" if rep.passed else "FAIL", item.name, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, name, detail = _CRITERIA[n]
        line = f"criterion {n}: {status}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
