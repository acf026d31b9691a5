from __future__ import annotations

import math

import pytest
from gmpy2 import mpq

from blasiuscert import data
from blasiuscert.exact import BiPoly
from blasiuscert.interval import Interval
from blasiuscert.quasi import (
    CertifiedValue, DomainError, FarParams, F0_outer, compose_inner, eval_with_envelope,
    nominal_params, outer_radius, t_of_x, wall_stress,
)
from blasiuscert.reference import RANGES, TM_RANGE


def test_F0_at_origin_is_alpha(inner):
    assert inner.F0.at_x(0) == BiPoly.alpha()
    assert inner.F0p.at_x(0) == BiPoly.const(0)
    assert inner.F0pp.at_x(0) == BiPoly.const(1)


def test_degrees(inner):
    assert (inner.F0.deg_x, inner.F0.deg_alpha) == (16, 5)
    assert (inner.R.deg_x, inner.R.deg_alpha) == (30, 10)


def test_residual_definition(inner):
    F = inner.F0
    assert inner.R == F.diff_x(3) + F * F.diff_x(2)
    assert inner.G3 - inner.G2 == BiPoly.const(1)


def test_value_at_matching_point(inner):
    v = inner.F0(mpq(5, 2), 0)
    lo, hi = RANGES["F0:I4"]
    assert isinstance(v, type(mpq(1))) and lo <= v <= hi


def test_compose_is_deterministic():
    assert compose_inner() == compose_inner()


def test_nominal_params_at_zero():
    a, b, c = nominal_params(0)
    assert a == mpq(3221, 1946) and b == mpq(-2763, 1765) and c == mpq(377, 1613)
    assert float(a) == pytest.approx(1.655190, abs=1e-6)


def test_nominal_params_stay_in_box():
    for k in range(-6, 7):
        a, b, _ = nominal_params(mpq(k, 100))
        assert 1.5 + float(data.RHO0) < a < 1.75 - float(data.RHO0)
        assert -1.75 + 2 * float(data.RHO0) < b < -1.4 - 2 * float(data.RHO0)


def test_alpha_outside_J_rejected():
    with pytest.raises(DomainError):
        nominal_params(mpq(1, 10))


def test_t_of_x():
    assert t_of_x(1, 2, 0) == 1
    assert t_of_x(mpq(3, 4), mpq(2), mpq(-3, 2)) == 0
    a, b, _ = nominal_params(0)
    tm = t_of_x(data.X_MATCH, a, b)
    assert TM_RANGE[0] < tm < TM_RANGE[1]
    assert float(tm) == pytest.approx(1.9991, abs=1e-4)
    with pytest.raises(DomainError):
        t_of_x(1, 0, 1)


def test_outer_linear_when_c_vanishes():
    p = FarParams(1.6, -1.5, 0.0)
    v = F0_outer(3, p)
    assert v.lo <= 1.6 * 3 - 1.5 <= v.hi
    assert 1.6 in F0_outer(3, p, 1)


def test_outer_derivative_matches_finite_difference():
    a, b, c = (float(v) for v in nominal_params(0))
    p = FarParams(a, b, c)
    h = 1e-5
    fd = (F0_outer(3 + h, p).mid - F0_outer(3 - h, p).mid) / (2 * h)
    assert fd == pytest.approx(F0_outer(3, p, 1).mid, abs=1e-8)
    fd2 = (F0_outer(3 + h, p, 1).mid - F0_outer(3 - h, p, 1).mid) / (2 * h)
    assert fd2 == pytest.approx(F0_outer(3, p, 2).mid, abs=1e-8)
    assert abs(F0_outer(20, p, 1).mid - a) < 1e-12


def test_outer_domain():
    p = FarParams(1.65, -1.56, 0.2)
    with pytest.raises(DomainError):
        F0_outer(2, p)
    with pytest.raises(DomainError):
        FarParams(1.65, -1.56, 0.3)


def test_inner_envelope_at_origin():
    env = eval_with_envelope(0, 0)
    assert env["F"].value == 0 and env["F"].radius == pytest.approx(7.4947e-6, rel=1e-12)
    assert env["F''"].value == 1 and env["F''"].radius == pytest.approx(4.8916e-6, rel=1e-12)
    env = eval_with_envelope(0, mpq(-3, 100))
    assert env["F"].value == pytest.approx(-0.03)


def test_subinterval_radii_are_local():
    near = eval_with_envelope(mpq(1, 10), 0, radii="subinterval")
    far = eval_with_envelope(mpq(5, 2), 0, radii="subinterval")
    assert near["F"].radius < far["F"].radius
    with pytest.raises(ValueError):
        eval_with_envelope(0, 0, radii="bogus")


def test_outer_radius_just_past_matching_point():
    r = outer_radius("F''", 2.0)
    assert r == pytest.approx(5.4901e-4 / 2 * math.exp(-6), rel=1e-10)
    assert r == pytest.approx(6.8e-7, rel=0.02)


def test_outer_branch_needs_certified_parameters():
    with pytest.raises(DomainError):
        eval_with_envelope(3, 0)
    wrong = FarParams(1.65, -1.56, 0.23, alpha=0.03, certified=True)
    with pytest.raises(DomainError):
        eval_with_envelope(3, 0, matched=wrong)


def test_wall_stress():
    unit = FarParams(1.0, 0.0, 0.0, alpha=0.0, certified=True)
    assert wall_stress(0, unit).value == pytest.approx(1.0, abs=1e-15)
    lo = wall_stress(0, FarParams(1.655, -1.56, 0.23, alpha=0.0, certified=True))
    hi = wall_stress(0, FarParams(1.656, -1.56, 0.23, alpha=0.0, certified=True))
    assert hi.value < lo.value


def test_certified_value():
    v = CertifiedValue(1.0, 0.5, "F")
    assert v.contains(1.4) and not v.contains(1.6)
    assert v.overlaps(CertifiedValue(1.9, 0.5, "F"))
    with pytest.raises(ValueError):
        CertifiedValue(1.0, -1.0, "F")


def test_far_params_box():
    p = FarParams(1.65, -1.56, 0.23, radius=1e-3)
    a, b, c = p.box()
    assert isinstance(a, Interval) and b.hi - b.lo == pytest.approx(4e-3)
    with pytest.raises(ValueError):
        p.trust_distance()
