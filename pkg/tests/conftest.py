import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pulsarvqc import dataio  # noqa: E402

_criteria: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion covered by the test")


@pytest.fixture(scope="session")
def htru2():
    path = dataio.find_dataset()
    if path is None:
        pytest.skip(
            f"HTRU-2 not found (set ${dataio.DATASET_ENV} or place data/HTRU_2.csv; "
            "'pulsarvqc fetch-data' downloads it)"
        )
    return dataio.load_csv(path)


@pytest.fixture
def fixture_data():
    return dataio.load_fixture()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    cid, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        prev = _criteria.get(cid, (title, "PASS"))[1]
        # worst outcome wins when several tests share a criterion
        rank = {"PASS": 0, "SKIP": 1, "FAIL": 2}
        _criteria[cid] = (title, status if rank[status] >= rank[prev] else prev)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_criteria, key=lambda c: int(c)):
        title, status = _criteria[cid]
        terminalreporter.write_line(f"criterion {cid:>2} {status:4}  {title}")
