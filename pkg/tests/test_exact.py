from __future__ import annotations

from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from blasiuscert.exact import (
    BiPoly, Q, RInterval, WindowError, affine_rescale, cheb_coefficients, cheb_eval,
    cheb_expand, chebyshev_of_monomials, cubic_extrema, inverse_rescale, l1_tail,
    round_dec, round_sig,
)

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=50)
unit = st.fractions(min_value=-1, max_value=1, max_denominator=64)
small_poly = st.lists(st.lists(rationals, min_size=1, max_size=4), min_size=1, max_size=5).map(BiPoly)


@st.composite
def windows(draw):
    lo = draw(rationals)
    w = draw(st.fractions(min_value=Fraction(1, 20), max_value=5, max_denominator=20))
    return (lo, lo + w)


def test_q_parses_decimal_strings_exactly():
    assert Q("0.0625") == mpq(1, 16)
    assert Q("-3/50") == mpq(-3, 50)
    assert Q(0.5) == mpq(1, 2)


@given(small_poly, windows(), windows())
@settings(max_examples=60, deadline=None)
def test_rescale_round_trip(p, wx, wa):
    assert inverse_rescale(affine_rescale(p, wx, wa), wx, wa) == p


@given(small_poly, windows(), windows(), unit, unit)
@settings(max_examples=60, deadline=None)
def test_rescaled_evaluation_agrees(p, wx, wa, u, v):
    g = affine_rescale(p, wx, wa)
    x = (wx[0] + wx[1]) / 2 + (wx[1] - wx[0]) / 2 * u
    a = (wa[0] + wa[1]) / 2 + (wa[1] - wa[0]) / 2 * v
    assert g(u, v) == p(x, a)


@given(small_poly, unit, unit)
@settings(max_examples=60, deadline=None)
def test_chebyshev_round_trip(p, u, v):
    assert cheb_eval(cheb_coefficients(p), u, v) == p(u, v)


def test_affine_examples():
    assert affine_rescale(BiPoly.x(), (0, 1), (0, 1)) == BiPoly([[mpq(1, 2)], [mpq(1, 2)]])
    sq = BiPoly([[0], [0], [1]])
    assert affine_rescale(sq, (-1, 1), (-1, 1)) == sq


def test_degenerate_window_rejected():
    with pytest.raises(WindowError):
        affine_rescale(BiPoly.x(), (1, 1), (0, 1))


def test_residual_rescaling_spot_checks(inner):
    wx, wa = (mpq(3, 4), mpq(11, 10)), (mpq(-3, 50), mpq(-1, 50))
    g = affine_rescale(inner.R, wx, wa)
    pts = [(mpq(1, 3), mpq(-2, 7)), (mpq(-5, 9), mpq(4, 5)), (mpq(0), mpq(0)),
           (mpq(1), mpq(-1)), (mpq(7, 11), mpq(1, 13))]
    for u, v in pts:
        x = (wx[0] + wx[1]) / 2 + (wx[1] - wx[0]) / 2 * u
        a = (wa[0] + wa[1]) / 2 + (wa[1] - wa[0]) / 2 * v
        assert g(u, v) == inner.R(x, a)


@pytest.mark.parametrize("coeffs, lo, hi", [
    ((0, 0, 0, 1), -1, 1),
    ((5,), 5, 5),
    ((1, 0, -1), 0, 1),
])
def test_cubic_extrema_examples(coeffs, lo, hi):
    mn, mx = cubic_extrema(coeffs)
    assert mn.lo <= lo <= mn.hi
    assert mx.lo <= hi <= mx.hi


@given(st.lists(rationals, min_size=4, max_size=4))
@settings(max_examples=80, deadline=None)
def test_cubic_extrema_enclose_samples(c):
    mn, mx = cubic_extrema(c)
    for k in range(-20, 21):
        y = Fraction(k, 20)
        v = c[0] + c[1] * y + c[2] * y * y + c[3] * y ** 3
        assert mn.lo <= v <= mx.hi
    assert mn.hi - mn.lo <= mpq(1, 10**9)


def test_l1_tail_examples():
    assert l1_tail(BiPoly.const(0)) == 0
    assert l1_tail(BiPoly.x() * BiPoly.alpha()) == 1
    assert l1_tail(BiPoly([[1, 2], [3, -4]]), [(0, 0), (1, 0)]) == 6


def test_chebyshev_identities():
    tab = chebyshev_of_monomials(3)
    assert tab[2] == [mpq(1, 2), 0, mpq(1, 2)]
    assert tab[3] == [0, mpq(3, 4), 0, mpq(1, 4)]
    r = cheb_coefficients(BiPoly.const(7))
    assert r == [[7]]


def test_cheb_expand_on_window():
    p = BiPoly([[0], [0], [1]])
    r = cheb_expand(p, (0, 2), (0, 1))
    # x = 1 + x~, so x^2 = 3/2 T0 + 2 T1 + 1/2 T2
    assert [row[0] for row in r] == [mpq(3, 2), 2, mpq(1, 2)]


def test_bipoly_calculus():
    x, a = BiPoly.x(), BiPoly.alpha()
    p = x ** 3 * a + x * 2
    assert p.diff_x() == x ** 2 * a * 3 + 2
    assert p.diff_alpha() == x ** 3
    assert p.integrate_x(0, 1) == a * mpq(1, 4) + 1
    assert (x * x * a).divide_x_power(2) == a
    assert (x * x * a).x_valuation() == 2


@given(st.fractions(min_value=Fraction(1, 10**6), max_value=10**6, max_denominator=10**6),
       st.integers(min_value=1, max_value=8))
@settings(max_examples=100, deadline=None)
def test_directed_rounding_brackets(q, digits):
    q = Q(q)
    down, up = round_sig(q, digits, "down"), round_sig(q, digits, "up")
    assert down <= q <= up
    assert down <= round_sig(q, digits) <= up
    assert round_sig(round_sig(q, digits, "up"), digits, "up") == up
    d = round_dec(q, digits)
    assert abs(d - q) <= mpq(1, 2) / mpq(10) ** digits


def test_round_sig_examples():
    assert round_sig(Q("2.93432e-6"), 5, "up") == Q("2.9344e-6")
    assert round_sig(Q("-0.12345"), 3, "down") == Q("-0.124")
    assert round_dec(Q("0.00005"), 4) == 0


def test_rinterval_arithmetic():
    a = RInterval(mpq(1), mpq(2))
    b = RInterval(mpq(-1), mpq(3))
    assert (a * b) == RInterval(mpq(-2), mpq(6))
    assert mpq(3, 2) in a
    with pytest.raises(ValueError):
        RInterval(mpq(2), mpq(1))
