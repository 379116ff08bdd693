"""Per-criterion PASS/FAIL reporting for the acceptance suite.

Tests decorated with ``@pytest.mark.criterion("AC3", "title")`` are grouped;
a criterion passes only if every one of its tests passed.
"""
from __future__ import annotations

from collections import OrderedDict

import pytest

_RESULTS: "OrderedDict[str, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion covered by a test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            cid, title = mark.args
            _RESULTS.setdefault(cid, {"title": title, "ok": True, "ran": 0})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    entry = _RESULTS[mark.args[0]]
    if report.when == "call":
        entry["ran"] += 1
    if report.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_RESULTS, key=lambda c: int(c[2:])):
        entry = _RESULTS[cid]
        if not entry["ok"]:
            status = "FAIL"
        else:
            status = "PASS" if entry["ran"] else "NOT RUN"
        terminalreporter.write_line(f"{status} {cid}: {entry['title']}")
