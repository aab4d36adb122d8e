from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pseudosym.catalog import builtin  # noqa: E402
from pseudosym.classify import full_report  # noqa: E402
from pseudosym.curvature import CurvatureBundle  # noqa: E402
from pseudosym.energy import energy_momentum  # noqa: E402

from reference import RTParser  # noqa: E402

# criterion number -> list of (test name, outcome)
CRITERIA: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if hasattr(rep, "wasxfail"):
            state = "xfail" if rep.skipped else "xpass"
        else:
            state = rep.outcome
        CRITERIA.setdefault(marker.args[0], []).append((item.name, state, getattr(rep, "wasxfail", "")))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        rows = CRITERIA[n]
        red = [r for r in rows if r[1] != "passed"]
        tr.write_line(f"criterion {n:2d}: {'PASS' if not red else 'FAIL'}  ({len(rows) - len(red)}/{len(rows)} checks)")
        for name, state, reason in red:
            tr.write_line(f"    {state}: {name}" + (f"  [{reason}]" if reason else ""))


@pytest.fixture(scope="session")
def rt_metric():
    return builtin("robinson-trautman-jet")


@pytest.fixture(scope="session")
def rt(rt_metric):
    return CurvatureBundle(rt_metric)


@pytest.fixture(scope="session")
def rt_parse(rt_metric):
    return RTParser(rt_metric)


@pytest.fixture(scope="session")
def rt_em(rt):
    return energy_momentum(rt)


@pytest.fixture(scope="session")
def rt_report(rt_metric, rt):
    return full_report(rt_metric, trials=2, seed=0, bundle=rt)


@pytest.fixture(scope="session")
def sr_metric():
    return builtin("som-raychaudhuri")


@pytest.fixture(scope="session")
def sr(sr_metric):
    return CurvatureBundle(sr_metric)


@pytest.fixture(scope="session")
def sr_report(sr_metric, sr):
    return full_report(sr_metric, trials=2, seed=0, bundle=sr)


@pytest.fixture(scope="session")
def minkowski_report():
    return full_report(builtin("minkowski"), trials=2)


@pytest.fixture(scope="session")
def sympy_rt():
    from oracle import robinson_trautman

    return robinson_trautman()
