import numpy as np
import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    key = (mark.args[0], mark.args[1])
    ok = rep.passed or rep.skipped
    if rep.when == "setup" and ok:
        return
    _CRITERIA.setdefault(key, []).append(ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for (n, label), results in sorted(_CRITERIA.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        status = "PASS" if all(results) else "FAIL"
        tr.write_line(f"criterion {n:>2} [{status}] {label}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
