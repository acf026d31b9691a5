from __future__ import annotations

from dataclasses import replace

import mpmath
import pytest
from gmpy2 import mpq

from blasiuscert import reference as ref
from blasiuscert.oracle import (
    OracleError, compare_envelope, fit_far_params, integrate_ivp, nominal_wall_stress,
    numeric_wall_stress, taylor_coeffs,
)
from blasiuscert.quasi import DomainError, nominal_params


@pytest.fixture(scope="module")
def traj0():
    return integrate_ivp(0, x_end=15.0)


def test_recurrence_matches_the_ode():
    c = taylor_coeffs(mpmath.mpf("0.1"), mpmath.mpf("0.2"), mpmath.mpf(1), order=10)
    # F''' = -F F'' at the expansion point
    assert 6 * c[3] == pytest.approx(-float(c[0]) * 2 * float(c[2]))


def test_initial_conditions(traj0):
    assert traj0.eval(0) == 0 and traj0.eval(0, 1) == 0 and traj0.eval(0, 2) == 1
    t = integrate_ivp(mpq(-3, 50), x_end=3.0)
    assert t.eval(0) == pytest.approx(-0.06)


@pytest.mark.parametrize("x", [1.0, 2.5])
def test_log_derivative_identity(traj0, x):
    assert traj0.eval(x, 2) == pytest.approx(float(mpmath.exp(-traj0.integral(x))), abs=1e-12)


def test_inner_bound_contains_trajectory(traj0, inner):
    assert abs(traj0.eval(2.5) - float(inner.F0(mpq(5, 2), 0))) <= 7.4947e-6


def test_tolerance_halving(traj0):
    finer = integrate_ivp(0, x_end=15.0, tol=5e-21)
    assert abs(finer.eval_mp(2.5) - traj0.eval_mp(2.5)) < 1e-13
    assert finer.n_steps >= traj0.n_steps


def test_fit_at_zero(traj0):
    a, b, c = fit_far_params(traj0)
    a0, b0, c0 = (float(v) for v in nominal_params(0))
    assert abs(a - ref.A_NUM) < 1e-4 and abs(a - a0) < 1e-4
    assert abs(b - b0) < 5e-4
    assert abs(c - c0) < 5e-4
    assert numeric_wall_stress(traj0) == pytest.approx(ref.WALL_STRESS, abs=1e-4)
    assert nominal_wall_stress(0) == pytest.approx(ref.WALL_STRESS, abs=1e-4)


class _Linear:
    x_end = 20.0

    def eval_mp(self, x, order=0):
        x = mpmath.mpf(x)
        return [2 * x - 1, mpmath.mpf(2), mpmath.mpf(0)][order]


def test_fit_on_synthetic_linear_far_field():
    a, b, c = fit_far_params(_Linear())
    assert (a, b, c) == (2.0, -1.0, 0.0)


def test_fit_needs_a_long_trajectory():
    with pytest.raises(ValueError):
        fit_far_params(integrate_ivp(0, x_end=8.0))


def test_input_validation(traj0):
    with pytest.raises(DomainError):
        integrate_ivp(0.1)
    with pytest.raises(ValueError):
        integrate_ivp(0, x_end=40)
    with pytest.raises(ValueError):
        traj0.eval(16)
    with pytest.raises(OracleError):
        integrate_ivp(0, x_end=2.0, h_max=1e-7, h_min=1e-6)


def test_envelope_contains_oracle_at_zero():
    rep = compare_envelope(alphas=("0",), n_points=25, x_max=10.0)
    assert rep.passed
    assert rep.max_utilization < 1
    assert rep.max_deviation("F") < 7.4947e-6


def test_corrupted_quasi_solution_is_caught(inner):
    bad = replace(inner, F0=inner.F0 + mpq(1, 10**4))
    rep = compare_envelope(alphas=("0",), n_points=25, x_max=10.0, inner=bad)
    assert not rep.passed
    assert all(r.x <= 2.5 and r.quantity == "F" for r in rep.violations)
