from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbitquant.exactnum import (
    H,
    ONE,
    ZERO,
    HPoly,
    HRat,
    NotPolynomial,
    ZeroDenominator,
    as_rational,
    format_rational,
    hpoly_gcd,
    render_hpoly,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=7)
hpolys = st.lists(rationals, max_size=5).map(HPoly)
nonzero_hpolys = hpolys.filter(bool)


def test_render_examples():
    assert render_hpoly(HPoly([1, 0, Fraction(-1, 4)])) == "1 - 1/4*h^2"
    assert render_hpoly(H) == "h"
    assert render_hpoly(ZERO) == "0"
    assert render_hpoly(HPoly([0, -2])) == "-2*h"


def test_trailing_zeros_are_dropped():
    p = HPoly([1, 2, 0, 0])
    assert p.degree == 1
    assert p == HPoly([1, 2])
    assert ZERO.degree == float("-inf")


def test_as_rational_and_format():
    assert as_rational("3/6") == Fraction(1, 2)
    assert as_rational(2) == Fraction(2)
    assert format_rational(Fraction(-3, 4)) == "-3/4"
    assert format_rational(Fraction(5)) == "5"


@given(hpolys, hpolys, hpolys)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == ZERO
    assert a * ONE == a


@given(hpolys, hpolys, rationals)
def test_evaluation_is_a_homomorphism(a, b, x):
    assert (a * b)(x) == a(x) * b(x)
    assert (a + b)(x) == a(x) + b(x)


@given(hpolys, nonzero_hpolys)
def test_divmod(a, b):
    q, r = a.divmod(b)
    assert q * b + r == a
    assert not r or r.degree < b.degree


@given(nonzero_hpolys, nonzero_hpolys)
def test_gcd_divides_both(a, b):
    g = hpoly_gcd(a, b)
    assert g.leading_coefficient() == 1
    assert not a.divmod(g)[1]
    assert not b.divmod(g)[1]


@given(hpolys, nonzero_hpolys, nonzero_hpolys)
def test_hrat_normal_form(a, b, c):
    # a*c / (b*c) normalizes to the same pair as a / b
    assert HRat(a * c, b * c) == HRat(a, b)
    r = HRat(a, b)
    assert r.den.leading_coefficient() == 1


@given(hpolys, nonzero_hpolys, hpolys, nonzero_hpolys)
def test_hrat_field_ops(a, b, c, d):
    x, y = HRat(a, b), HRat(c, d)
    assert (x + y) - y == x
    if y:
        assert (x * y) / y == x
        assert y * y.inverse() == HRat.of(ONE)


def test_hrat_polynomial_checks():
    assert HRat(H * H - ONE, H - ONE).to_hpoly() == H + ONE
    with pytest.raises(NotPolynomial):
        HRat(ONE, H).to_hpoly()
    with pytest.raises(ZeroDenominator):
        HRat(ONE, ZERO)
