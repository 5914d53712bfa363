import functools

import pytest
from hypothesis import HealthCheck, settings

from orbitquant.liealg import make_sl
from orbitquant.orbitideal import (
    equivariance_certificate,
    minimalpoly_generators,
    orbit_from_eigs,
    regular_generators,
)
from orbitquant.starquant import build_engine

settings.register_profile(
    "repo", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("repo")

SPECS = {
    "sl2-regular": ("sl2", [(1, 1), (-1, 1)]),
    "sl3-regular": ("sl3", [(1, 1), (0, 1), (-1, 1)]),
    "sl3-cp2": ("sl3", [(1, 2), (-2, 1)]),
}


@functools.lru_cache(maxsize=None)
def algebra(n):
    return make_sl(n)


@functools.lru_cache(maxsize=None)
def orbit(key):
    name, eigs = SPECS[key]
    return orbit_from_eigs(algebra(int(name[2:])), eigs)


@functools.lru_cache(maxsize=None)
def presented(key, source="auto"):
    sp = orbit(key)
    if source == "auto":
        source = "invariants" if sp.is_regular() else "minimal-polynomial"
    pres = regular_generators(sp) if source == "invariants" else minimalpoly_generators(sp)
    return pres, equivariance_certificate(pres)


@functools.lru_cache(maxsize=None)
def engine(key, D, lift="weyl", strict=False):
    pres, cert = presented(key)
    return build_engine(pres.algebra, pres, cert, D, lift=lift, strict=strict)


# -- acceptance criterion bookkeeping ---------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        entry = _CRITERIA.setdefault(n, {"passed": True, "tests": []})
        entry["tests"].append((item.name, rep.passed))
        entry["passed"] = entry["passed"] and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        failed = [name for name, ok in e["tests"] if not ok]
        status = "PASS" if e["passed"] else "FAIL"
        tail = f"  (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n:>2}: {status}{tail}")
