from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from k3cone.hilbscheme import build_hilb

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# Each acceptance test appends (number, passed, text); printed in the terminal summary.
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture(scope="session")
def hl():
    return build_hilb([[6, 8], [8, 6]], 3, [[1, 0], [0, 1]])


@pytest.fixture(scope="session")
def lat(hl):
    return hl.lattice


@pytest.fixture(scope="session")
def surface(hl):
    return hl.surface


@pytest.fixture(scope="session")
def mori_rays(lat):
    h = Fraction(-3, 2)
    return [
        lat.vec(0, 1, 0),
        lat.vec(1, h, 0),
        lat.vec(0, h, 1),
        lat.vec(2, Fraction(-1, 2), -1),
        lat.vec(-1, Fraction(-1, 2), 2),
    ]


@pytest.fixture(scope="session")
def ample_rays(lat):
    return [lat.vec(5, 0, -2), lat.vec(-2, 0, 5), lat.vec(11, -7, -3), lat.vec(-3, -7, 11), lat.vec(3, -7, 3)]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, text in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {text}")


# outcomes of the randomized property suites, keyed by test function name
PROPERTY_RESULTS: dict[str, bool] = {}


def pytest_collection_modifyitems(session, config, items):
    # acceptance runs last so it can read the property-suite outcomes of this session
    items.sort(key=lambda it: it.fspath.basename == "test_acceptance.py")


def pytest_runtest_logreport(report):
    if "property_suite" not in report.keywords:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or not report.passed:
        PROPERTY_RESULTS[name] = PROPERTY_RESULTS.get(name, True) and report.passed
