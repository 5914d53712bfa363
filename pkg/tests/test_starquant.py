import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitquant.envalg import PBWElement, sorted_word_lift, u_mul, weyl_map
from orbitquant.exactnum import H, HPoly
from orbitquant.polyring import CPoly, MonomialOrder, normal_form
from orbitquant.starquant import (
    DegreeOverflow,
    IndependenceViolation,
    SingularEvaluation,
    SpanDeficient,
    build_engine,
    check_theorem,
    evaluate_engine_h,
    evaluated_table_consistent,
    lemma1_defects,
    lift_ideal,
    nf,
    shifted_roots,
    star,
    star_value,
    weyl_transport,
    weyl_transport_inverse,
)

from conftest import engine, presented

X = {"E": (1, 0, 0), "F": (0, 1, 0), "H": (0, 0, 1)}


def var(name):
    return CPoly.monomial(X[name])


def test_sphere_fixture():
    eng = engine("sl2-regular", 4)
    ef = star(eng, var("E"), var("F")).render()
    fe = star(eng, var("F"), var("E")).render()
    assert ef == "1 + 1/2*h*xH - 1/4*xH^2"
    assert fe == "1 - 1/2*h*xH - 1/4*xH^2"
    comm = star_value(eng, var("E"), var("F")) - star_value(eng, var("F"), var("E"))
    assert comm == CPoly(3, {X["H"]: H})


def test_sphere_ranks():
    eng = engine("sl2-regular", 4)
    assert eng.rank_by_degree == [0, 0, 1, 3, 6]
    assert eng.std_by_degree == [1, 3, 5, 7, 9]
    assert eng.pbw_by_degree == [1, 3, 6, 10, 15]
    assert eng.sound and eng.rank_identity_holds()


def test_generators_reduce_to_zero():
    for key, D in (("sl2-regular", 4), ("sl3-regular", 3)):
        eng = engine(key, D)
        for R in eng.lifted.R:
            assert not nf(eng, R)


@given(st.dictionaries(st.sampled_from([(a, b, c) for a in range(3) for b in range(3)
                                        for c in range(3) if a + b + c <= 4]),
                       st.integers(-3, 3).filter(bool).map(HPoly.const), max_size=4))
def test_nf_is_idempotent_and_linear(t):
    eng = engine("sl2-regular", 4)
    u = PBWElement(eng.alg, t)
    r = nf(eng, u)
    assert all(m in eng.std for m in r.terms)
    assert nf(eng, sorted_word_lift(r, eng.alg)) == r
    assert nf(eng, u.scale(H)) == r * CPoly(3, {(0, 0, 0): H})


def test_degree_overflow():
    eng = engine("sl2-regular", 4)
    with pytest.raises(DegreeOverflow):
        star(eng, var("E") ** 3, var("F") ** 2)


def test_threads_do_not_change_the_engine():
    pres, cert = presented("sl3-regular")
    a = build_engine(pres.algebra, pres, cert, 3, threads=1)
    b = build_engine(pres.algebra, pres, cert, 3, threads=4)
    assert a.table == b.table
    assert a.rank_by_degree == b.rank_by_degree


def test_slack_keeps_the_table():
    pres, cert = presented("sl2-regular")
    a = build_engine(pres.algebra, pres, cert, 4)
    b = build_engine(pres.algebra, pres, cert, 4, slack=1)
    assert a.table == b.table
    assert b.metadata()["slack"] == 1


def test_weyl_transport_round_trip():
    eng = engine("sl2-regular", 4)
    rng = random.Random(3)
    for _ in range(20):
        mons = rng.sample(list(eng.std.monomials), 3)
        f = CPoly(3, {m: HPoly([rng.randint(-2, 2) or 1, rng.randint(-1, 1)]) for m in mons})
        assert weyl_transport_inverse(eng, weyl_transport(eng, f)) == f


def test_weyl_mode_commutator_and_limit():
    eng = engine("sl2-regular", 4)
    ef = star_value(eng, var("E"), var("F"), "weyl")
    fe = star_value(eng, var("F"), var("E"), "weyl")
    assert ef - fe == CPoly(3, {X["H"]: H})
    assert ef.eval_h(0) == normal_form(var("E") * var("F"), eng.gb)


@pytest.mark.parametrize("key,D", [("sl2-regular", 4), ("sl3-regular", 3)])
def test_theorem_checks_pass(key, D):
    rep = check_theorem(engine(key, D), trials=10)
    assert rep.passed, [r for r in rep.results if not r.passed]


def test_evaluation_matches_polynomial_table():
    eng = engine("sl2-regular", 4)
    for h0 in (0, 1, Fraction(-2, 3)):
        ev = evaluate_engine_h(eng, h0)
        assert ev.independent
        assert evaluated_table_consistent(ev)


# -- the non-regular orbit ----------------------------------------------------------


def test_weyl_lift_of_cp2_collapses():
    # W(r) for the quadratic matrix entries puts the degree-one generators
    # into the ideal as soon as h != 0
    pres, cert = presented("sl3-cp2")
    assert lemma1_defects(pres, cert) == []
    with pytest.raises(IndependenceViolation):
        build_engine(pres.algebra, pres, cert, 3)
    eng = engine("sl3-cp2", 3)
    assert eng.rank_by_degree == [0, 8, 9, 56]
    assert not eng.rank_identity_holds()
    with pytest.raises(SingularEvaluation):
        evaluate_engine_h(eng, 1)
    ev0 = evaluate_engine_h(eng, 0)
    assert ev0.rank_by_degree == [0, 0, 9, 56]


def test_shifted_roots_for_cp2():
    pres, _ = presented("sl3-cp2")
    assert shifted_roots(pres) == [HPoly([1]), HPoly([-2, -2])]


def test_shifted_lift_satisfies_lemma1():
    pres, cert = presented("sl3-cp2")
    lifted = lift_ideal(pres, cert, "shifted")
    assert lemma1_defects(pres, cert, lifted.R) == []
    for r, R in zip(pres.generators, lifted.R):
        assert R.to_cpoly().eval_h(0) == r
        assert R != weyl_map(r, pres.algebra)


def test_shifted_lift_quantizes_cp2():
    eng = engine("sl3-cp2", 3, "shifted")
    assert eng.sound
    assert eng.rank_by_degree == [0, 0, 9, 56]
    assert eng.rank_identity_holds()
    rep = check_theorem(eng, trials=20)
    assert rep.passed, [r for r in rep.results if not r.passed]
    for h0 in (0, 1, -1, Fraction(1, 2), Fraction(1, 3)):
        assert evaluated_table_consistent(evaluate_engine_h(eng, h0))


def test_shifted_lift_rejects_invariant_presentations():
    pres, cert = presented("sl2-regular")
    with pytest.raises(ValueError):
        lift_ideal(pres, cert, "shifted")


def test_small_truncation_is_reported():
    pres, cert = presented("sl3-cp2")
    with pytest.raises(ValueError):
        build_engine(pres.algebra, pres, cert, 1)


def test_permuted_priority_still_quantizes():
    pres, cert = presented("sl2-regular")
    order = MonomialOrder.grlex(3, [2, 1, 0])
    eng = build_engine(pres.algebra, pres, cert, 4, order)
    assert check_theorem(eng, trials=5).passed
    # xE*xF stays standard when xH leads the priority
    assert star(eng, var("E"), var("F")).render() == "xE*xF"
    assert star(eng, var("F"), var("E")).render() == "-h*xH + xE*xF"


@settings(max_examples=10)
@given(st.integers(0, 1000))
def test_star_associativity_random(seed):
    eng = engine("sl2-regular", 4)
    rng = random.Random(seed)
    polys = []
    for _ in range(3):
        m = rng.choice([mm for mm in eng.std.monomials if sum(mm) <= 1])
        polys.append(CPoly(3, {m: HPoly([rng.randint(1, 3)])}))
    f, g, k = polys
    left = star_value(eng, star_value(eng, f, g), k)
    right = star_value(eng, f, star_value(eng, g, k))
    assert left == right


def test_span_deficiency_is_surfaced():
    from orbitquant.liealg import make_sl
    from orbitquant.orbitideal import equivariance_certificate, minimalpoly_generators, \
        orbit_from_eigs
    alg = make_sl(4)
    sp = orbit_from_eigs(alg, [(1, 3), (-3, 1)])
    pres = minimalpoly_generators(sp)
    cert = equivariance_certificate(pres)
    with pytest.raises(SpanDeficient):
        build_engine(alg, pres, cert, 2, lift="shifted")


def test_u_mul_against_rewriting():
    eng = engine("sl2-regular", 4)
    a = PBWElement.generator(eng.alg, 1)
    b = PBWElement.generator(eng.alg, 0)
    assert u_mul(a, b) - u_mul(b, a) == PBWElement.generator(eng.alg, 2).scale(-H)


@pytest.mark.parametrize("c,flat", [((-1, 0), True), ((0, -2), True), ((0, 0), False),
                                    ((1, -3), False)])
def test_root_shifts_off_the_line_collapse(c, flat):
    pres, cert = presented("sl3-cp2")
    roots = [HPoly([1, c[0]]), HPoly([-2, c[1]])]
    lifted = lift_ideal(pres, cert, "shifted", roots=roots)
    eng = build_engine(pres.algebra, pres, cert, 3, lifted=lifted, strict=False)
    assert (not eng.violations and eng.rank_identity_holds()) == flat
