import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

_acceptance: dict[int, list[str]] = defaultdict(list)


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            item.user_properties.append(("acceptance", mark.args[0]))


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for key, value in report.user_properties:
        if key == "acceptance":
            _acceptance[value].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        outcomes = _acceptance[n]
        if all(o == "skipped" for o in outcomes):
            status = "N/A"
        elif all(o in ("passed", "skipped") for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE C{n} {status}")


@pytest.fixture
def fixtures_dir():
    from helpers import FIXTURES

    return FIXTURES
