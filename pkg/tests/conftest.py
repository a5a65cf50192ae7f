import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": 0, "failed": []})
    if call.excinfo is None:
        entry["passed"] += 1
    else:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        verdict = "FAIL" if entry["failed"] else "PASS"
        detail = f"{entry['passed']} checks" if not entry["failed"] else "failed: " + ", ".join(entry["failed"])
        terminalreporter.write_line(f"criterion {number} {verdict}  {entry['title']}  ({detail})")


@pytest.fixture(scope="session")
def reference_scenario():
    from nrsat.scenario import load_scenario

    return load_scenario("table9.scenario")
