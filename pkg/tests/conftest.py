import math

import pytest

from escape_atlas.efun import parse_spec

_CRITERIA = {}


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
    prev = _CRITERIA.get(n, ("PASS", []))
    status = prev[0] if rep.passed else "FAIL"
    _CRITERIA[n] = (status, prev[1] + [f"{item.name} ({call.duration:.2f}s)"])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, names = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  " + ", ".join(names))


@pytest.fixture(scope="session")
def exp():
    return parse_spec("exp")


@pytest.fixture(scope="session")
def fatou():
    return parse_spec("fatou")


@pytest.fixture(scope="session")
def coshsq():
    return parse_spec("coshsq")


@pytest.fixture(scope="session")
def catalog():
    return [parse_spec(s) for s in ("exp", "fatou", "coshsq", "sin", "polyexp:1,0,1")]


@pytest.fixture(scope="session")
def exp_scaffold(exp):
    from escape_atlas.eremenko import build_scaffold

    return build_scaffold(exp, 1000.0, 3)


TWO_PI = 2 * math.pi
