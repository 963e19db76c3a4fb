import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call" and not (call.when == "setup" and call.excinfo):
        return
    num, title = mark.args
    entry = _criteria.setdefault(num, (title, []))
    entry[1].append("passed" if call.excinfo is None else "failed")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria, key=lambda k: (int(str(k).rstrip("abc")), str(k))):
        title, outcomes = _criteria[num]
        status = "PASS" if outcomes and all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status}  {title}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240601)
