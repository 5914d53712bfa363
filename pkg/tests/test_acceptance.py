"""Acceptance criteria, one group of tests per criterion.

The three orbit specs are the sphere (sl2, eigenvalues 1, -1), the regular
sl3 orbit through diag(1, 0, -1) and the projective plane orbit of sl3
(eigenvalues 1, 1, -2).  Every engine here uses the default symmetrized lift
of the ideal generators.  The terminal summary prints one line per criterion.
"""
import random
import subprocess
import time
from fractions import Fraction

import pytest

from orbitquant.cli import intertwining_check
from orbitquant.envalg import ad_action, weyl_map
from orbitquant.exactnum import H, HPoly
from orbitquant.liealg import (
    adjoint_charpoly_invariants, invariants, jacobi_defects, make_sl, structure_defects)
from orbitquant.orbitideal import (
    conjugate_point, minimalpoly_generators, on_orbit, random_unimodular, regular_generators)
from orbitquant.polyring import (
    CPoly, MonomialOrder, buchberger, coadjoint_action, krull_dimension, monomials_up_to,
    normal_form, poisson_bracket, render_cpoly)
from orbitquant.starquant import (
    SingularEvaluation, check_theorem, evaluate_engine_h, evaluated_table_consistent,
    lemma1_defects, star)

from conftest import engine, orbit, presented

ALL_SPECS = ["sl2-regular", "sl3-regular", "sl3-cp2"]
DEGREE = {"sl2-regular": 4, "sl3-regular": 3, "sl3-cp2": 3}
EVAL_POINTS = [Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(1, 3)]


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, f"{self.elapsed:.1f}s over the {self.limit}s budget"


def failures(report, prefix):
    return [f"{r.name}: {r.witness}" for r in report.results
            if r.name.startswith(prefix) and not r.passed]


# -- 1 -------------------------------------------------------------------------------


@pytest.mark.criterion(1)
@pytest.mark.parametrize("n", [2, 3, 4])
def test_c1_structure(n):
    with Clock(5):
        alg = make_sl(n)
        assert jacobi_defects(alg) == []
        assert structure_defects(alg) == []


# -- 2 -------------------------------------------------------------------------------


@pytest.mark.criterion(2)
@pytest.mark.parametrize("n", [2, 3])
def test_c2_invariants_are_central(n):
    with Clock(5):
        alg = make_sl(n)
        for p in invariants(alg).generators:
            for i in range(alg.dim):
                assert not poisson_bracket(alg, p, CPoly.var(alg.dim, i))


@pytest.mark.criterion(2)
def test_c2_adjoint_charpoly_cross_check():
    alg = make_sl(2)
    rng = random.Random(2)
    qs = [q for q in adjoint_charpoly_invariants(alg) if q]
    assert qs
    with Clock(5):
        for _ in range(3):
            pt = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(alg.dim)]
            gb = buchberger([p - p.evaluate(pt) for p in invariants(alg).generators],
                            MonomialOrder.grlex(alg.dim))
            for q in qs:
                assert not normal_form(q - q.evaluate(pt), gb)


# -- 3 -------------------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_c3_intertwining_sl2_exhaustive():
    alg = make_sl(2)
    with Clock(30):
        for m in monomials_up_to(alg.dim, 4):
            f = CPoly.monomial(m)
            for i in range(alg.dim):
                assert ad_action(alg, i, weyl_map(f, alg)) == \
                    weyl_map(coadjoint_action(alg, i, f), alg).scale(H)


@pytest.mark.criterion(3)
def test_c3_intertwining_sl3_random():
    with Clock(30):
        res = intertwining_check(make_sl(3), random.Random(3), trials=100)
    assert res.passed, res.witness
    assert res.count == 100


# -- 4 -------------------------------------------------------------------------------


@pytest.mark.criterion(4)
@pytest.mark.parametrize("key", ALL_SPECS)
def test_c4_left_and_right_ideals_agree(key):
    with Clock(60):
        pres, cert = presented(key)
        assert lemma1_defects(pres, cert) == []


# -- 5 -------------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_c5_sphere_fixture():
    with Clock(10):
        eng = engine("sl2-regular", 4)
        E, F = CPoly.monomial((1, 0, 0)), CPoly.monomial((0, 1, 0))
        ef, fe = star(eng, E, F), star(eng, F, E)
        assert ef.render() == "1 + 1/2*h*xH - 1/4*xH^2"
        assert fe.render() == "1 - 1/2*h*xH - 1/4*xH^2"
        comm = ef.value - fe.value
        assert render_cpoly(comm, eng.alg.variables) == "h*xH"


# -- 6 -------------------------------------------------------------------------------


@pytest.mark.criterion(6)
@pytest.mark.parametrize("key", ALL_SPECS)
def test_c6_module_freeness(key):
    with Clock(300):
        eng = engine(key, DEGREE[key])
    assert eng.violations == [], (
        f"{len(eng.violations)} violation(s), first {type(eng.violations[0]).__name__}: "
        f"{eng.violations[0]}")
    assert eng.rank_identity_holds(), (
        f"ranks {eng.rank_by_degree}, standard {eng.std_by_degree}, PBW {eng.pbw_by_degree}")


# -- 7, 8 ----------------------------------------------------------------------------

_reports: dict = {}


def theorem_report(key):
    if key not in _reports:
        t0 = time.perf_counter()
        _reports[key] = (check_theorem(engine(key, DEGREE[key]), trials=50, seed=0),
                         time.perf_counter() - t0)
    return _reports[key]


@pytest.mark.criterion(7)
@pytest.mark.parametrize("key", ["sl2-regular", "sl3-cp2"])
def test_c7_classical_and_poisson_limits(key):
    rep, elapsed = theorem_report(key)
    assert elapsed < 300
    bad = failures(rep, "classical-limit") + failures(rep, "poisson-limit")
    assert not bad, bad


@pytest.mark.criterion(8)
@pytest.mark.parametrize("key", ["sl2-regular", "sl3-cp2"])
def test_c8_associativity(key):
    rep, elapsed = theorem_report(key)
    assert elapsed < 300
    res = [r for r in rep.results if r.name.startswith("associativity")]
    alg = engine(key, DEGREE[key]).alg
    assert all(r.count >= alg.dim ** 3 or not r.passed for r in res)
    bad = failures(rep, "associativity")
    assert not bad, bad


# -- 9 -------------------------------------------------------------------------------


@pytest.mark.criterion(9)
@pytest.mark.parametrize("key", ["sl2-regular", "sl3-cp2"])
@pytest.mark.parametrize("h0", EVAL_POINTS, ids=str)
def test_c9_evaluation_keeps_independence(key, h0):
    eng = engine(key, DEGREE[key])
    with Clock(60):
        try:
            ev = evaluate_engine_h(eng, h0)
        except SingularEvaluation as exc:
            pytest.fail(f"SingularEvaluation: {exc}")
    assert ev.independent
    assert ev.rank_by_degree == eng.rank_by_degree
    assert evaluated_table_consistent(ev)


@pytest.mark.criterion(9)
@pytest.mark.parametrize("key", ["sl2-regular", "sl3-cp2"])
def test_c9_projection_at_zero(key):
    eng = engine(key, DEGREE[key])
    rng = random.Random(9)
    pool = monomials_up_to(eng.alg.dim, eng.D)
    with Clock(60):
        ev = evaluate_engine_h(eng, 0)
        for _ in range(100):
            f = CPoly(eng.alg.dim, {m: HPoly.const(Fraction(rng.randint(-4, 4) or 1,
                                                            rng.randint(1, 3)))
                                    for m in rng.sample(pool, 4)})
            assert ev.nf(f) == normal_form(f, eng.gb), render_cpoly(f, eng.alg.variables)


# -- 10 ------------------------------------------------------------------------------


@pytest.mark.criterion(10)
@pytest.mark.parametrize("key", ["sl2-regular", "sl3-regular"])
def test_c10_presentations_coincide(key):
    sp = orbit(key)
    order = MonomialOrder.grlex(sp.algebra.dim)
    with Clock(60):
        assert buchberger(regular_generators(sp).generators, order) == \
            buchberger(minimalpoly_generators(sp).generators, order)


@pytest.mark.criterion(10)
@pytest.mark.parametrize("key,dim", [("sl2-regular", 2), ("sl3-regular", 6), ("sl3-cp2", 4)])
def test_c10_krull_dimension(key, dim):
    pres, _ = presented(key)
    with Clock(60):
        gb = buchberger(pres.generators, MonomialOrder.grlex(pres.algebra.dim))
        assert krull_dimension(gb) == dim


@pytest.mark.criterion(10)
@pytest.mark.parametrize("key", ALL_SPECS)
def test_c10_conjugates_are_members(key):
    pres, _ = presented(key)
    rng = random.Random(10)
    with Clock(60):
        for _ in range(20):
            g = random_unimodular(pres.orbit.n, rng)
            assert on_orbit(pres, conjugate_point(pres.orbit, g))


# -- 11 ------------------------------------------------------------------------------


def oq_check(args, threads):
    proc = subprocess.run(["oq", "check", *args, "--threads", str(threads)],
                          capture_output=True, check=False)
    return proc.returncode, proc.stdout


@pytest.mark.criterion(11)
@pytest.mark.parametrize("args", [
    ["--algebra", "sl2", "--eigs", "1,-1", "--deg", "4"],
    ["--algebra", "sl3", "--eigs", "1:2,-2:1", "--deg", "3", "--trials", "10"],
], ids=["sl2", "sl3-cp2"])
def test_c11_check_output_is_deterministic(args):
    runs = [oq_check(args, t) for t in (1, 2, 8)] + [oq_check(args, 1)]
    assert runs[0][1], "no output"
    assert all(r == runs[0] for r in runs[1:])
