import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).resolve().parents[1] / "src" / "vbstl" / "data"

# criterion number -> (title, all of its tests passed); reported after the run
_CRITERIA: dict[int, tuple[str, bool]] = {}


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    number = item.get_closest_marker("criterion")
    if number is None or rep.when != "call":
        return
    n, title = number.args
    ok = _CRITERIA.get(n, (title, True))[1] and rep.passed
    _CRITERIA[n] = (title, ok)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): exit-criterion check")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("exit criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
    terminalreporter.write_line(
        "criterion 11: NOT REPRODUCIBLE  external plant models and proprietary requirements "
        "are unavailable; see README"
    )
