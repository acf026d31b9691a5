from __future__ import annotations

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from blasiuscert import data
from blasiuscert import reference as ref
from blasiuscert.bounds import (
    SubregionGrid, cheb_bound, range_tables, residual_taylor_table, root_enclosure,
    taylor_bound, tm_range, verify_alpha_monotonicity, verify_sign_change,
)
from blasiuscert.energy import sign_proof
from blasiuscert.exact import BiPoly
from blasiuscert.report import compare


def test_residual_first_and_last_pairs(inner):
    table = residual_taylor_table(inner)
    assert compare("digits:5:sig", ref.RESIDUAL_TAYLOR["I1"], (table[0].lower, table[0].upper))
    assert compare("digits:5:sig", ref.RESIDUAL_TAYLOR["I4"], (table[3].lower, table[3].upper))
    assert table[3].outward_sig() == (4.9134e-7, 2.9344e-6)


def test_constant_polynomial_is_exact():
    rep = taylor_bound(BiPoly.const(3), (mpq(1, 3), mpq(2)))
    assert (rep.lower, rep.upper) == (3, 3)


@given(st.fractions(0, mpq(5, 2), max_denominator=200), st.fractions(mpq(-3, 50), mpq(3, 50), max_denominator=500))
@settings(max_examples=50, deadline=None)
def test_taylor_bound_encloses_point_values(x, a):
    from blasiuscert.quasi import build_inner

    R = build_inner().R
    rep = taylor_bound(R)
    assert rep.lower <= R(x, a) <= rep.upper


def test_refined_grid_tightens(inner):
    coarse = SubregionGrid(x_knots=(0, mpq(5, 4), mpq(5, 2)), alpha_knots=(data.ALPHA_MIN, data.ALPHA_MAX))
    wide = taylor_bound(inner.F0pp, grid=coarse)
    tight = taylor_bound(inner.F0pp)
    assert wide.lower <= tight.lower and tight.upper <= wide.upper


def test_bad_grid_rejected():
    with pytest.raises(ValueError):
        SubregionGrid(x_knots=(0, 1, 1, mpq(5, 2)))
    with pytest.raises(ValueError):
        SubregionGrid(x_knots=(0, 1))


def test_chebyshev_examples(inner):
    assert cheb_bound(inner.R) <= ref.CHEB_GLOBAL
    assert compare("digits:5:sig", ref.CHEB_SUBREGION["I1"], cheb_bound(inner.R, x_range=data.SUBINTERVALS[0]))
    assert compare("digits:5:sig", ref.CHEB_SUBREGION["I4"], cheb_bound(inner.R, x_range=data.SUBINTERVALS[3]))
    # T3 on [0, 1] x J, written in x
    y = BiPoly.x() * 2 - 1
    T3 = y ** 3 * 4 - y * 3
    assert cheb_bound(T3, windows=[((0, 1), (data.ALPHA_MIN, data.ALPHA_MAX))]) == 1


def test_range_examples(inner):
    reps = {r.region: r for r in range_tables(inner)}
    for key in ("F0:I2", "F0':I4", "F0'':I1"):
        r = reps[key]
        assert compare("digits:4:dec", ref.RANGES[key], (r.lower, r.upper)), key


def test_G3_sign_change_values():
    proof = sign_proof("G3")
    assert proof.certified and proof.sign_before == 1
    assert compare("digits:4:dec", (mpq("0.0781"), mpq("0.3463")), (proof.at_left.lower, proof.at_left.upper))
    assert compare("digits:4:dec", (mpq("-0.3564"), mpq("-0.1190")), (proof.at_right.lower, proof.at_right.upper))


@pytest.mark.parametrize("name", ["G1", "G2", "G3"])
def test_each_G_certified(name, inner):
    proof = sign_proof(name)
    assert proof.certified, proof.reason
    g = getattr(inner, name)
    root = root_enclosure(g, 0, proof)
    lo, hi = data.SIGN_BRACKETS[name]
    assert lo <= root.lo <= root.hi <= hi
    assert g(root.lo, 0) >= 0 >= g(root.hi, 0)


def test_sign_change_trivial_and_negative():
    g = BiPoly.x() - 1
    proof = verify_sign_change(-g, (mpq(1, 2), mpq(3, 2)))
    assert proof.certified
    # increasing g changes sign too but the proof expects positivity first
    assert verify_sign_change(g, (mpq(1, 2), mpq(3, 2))).certified
    bad = verify_sign_change(BiPoly.const(1), (mpq(1, 2), mpq(3, 2)))
    assert not bad.certified


def test_monotonicity(inner):
    proof = verify_alpha_monotonicity()
    assert proof.certified, [e.name for e in proof.failures()]
    whole = (0, data.X_MATCH)
    custom = verify_alpha_monotonicity([
        ("F0''", inner.F0pp, whole, 0),
        ("G3", inner.G3, (0, data.SIGN_BRACKETS["G3"][1]), 0),
        ("const", BiPoly.const(5), whole, 0),
    ])
    assert [e.certified for e in custom.entries] == [True, True, False]


def test_tm_range():
    lo, hi = tm_range()
    # the published digits are truncations of the enclosures
    assert compare("trunc:6", ref.TM_RANGE, (lo.lo, hi.hi))
    assert abs(float(lo.lo) - 1.962257) < 1e-6
    assert abs(float(hi.hi) - 2.043219) < 1e-6
    assert lo.lo > mpq(196, 100)
