import functools
import time

import pytest

from morsewitten.cli import run_scenario
from morsewitten.critical import find_critical_points
from morsewitten.scenarios import get_scenario


@functools.lru_cache(maxsize=None)
def timed_run(name):
    t0 = time.perf_counter()
    report = run_scenario(name)
    return report, time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def scenario_setup(name):
    sc = get_scenario(name)
    surface, field = sc.make_surface(), sc.make_field()
    cps = find_critical_points(surface, field, refine=False)
    return surface, field, cps


@pytest.fixture(scope="session")
def run():
    return lambda name: timed_run(name)[0]


@pytest.fixture(scope="session")
def setup():
    return scenario_setup


# -- acceptance summary ----------------------------------------------------------

_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or "::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    num = int(name.split("_")[2])
    if report.when == "call" or report.outcome != "passed":
        prev = _criteria.get(num, (name, "PASS"))[1]
        outcome = "PASS" if report.passed and prev == "PASS" else "FAIL"
        if report.skipped:
            outcome = "SKIP"
        _criteria[num] = (name, outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        name, outcome = _criteria[num]
        terminalreporter.write_line(f"criterion {num}: {outcome}  ({name})")
