"""End-to-end acceptance criteria, one test per criterion.

A summary line per criterion is printed by the hook in conftest.py.
"""
from __future__ import annotations

import time

import pytest

from blasiuscert import data
from blasiuscert import reference as ref
from blasiuscert.report import compare

pytestmark = pytest.mark.acceptance


def _digits5(claim, computed) -> bool:
    return compare("digits:5:sig", claim, computed)


def test_criterion_01_residual_taylor_bounds(inner):
    from blasiuscert.bounds import residual_taylor_table, taylor_cell

    taylor_cell.cache_clear()
    t0 = time.perf_counter()
    table = residual_taylor_table(inner)
    elapsed = time.perf_counter() - t0
    for k, rep in enumerate(table, 1):
        claim = ref.RESIDUAL_TAYLOR[f"I{k}"]
        assert _digits5(claim, (rep.lower, rep.upper)), (k, rep.outward_sig(), claim)
    assert elapsed < 60


def test_criterion_02_chebyshev_bounds(inner):
    from blasiuscert.bounds import cheb_bound, cheb_window

    cheb_window.cache_clear()
    t0 = time.perf_counter()
    assert cheb_bound(inner.R) <= ref.CHEB_GLOBAL
    for k, rng in enumerate(data.SUBINTERVALS, 1):
        v = cheb_bound(inner.R, x_range=rng)
        assert _digits5(ref.CHEB_SUBREGION[f"I{k}"], v), (k, float(v))
    assert time.perf_counter() - t0 < 30


def test_criterion_03_range_tables(inner):
    from blasiuscert.bounds import range_tables

    t0 = time.perf_counter()
    reps = range_tables(inner)
    assert len(reps) == 12
    for rep in reps:
        assert compare("digits:4:dec", ref.RANGES[rep.region], (rep.lower, rep.upper)), rep
    assert time.perf_counter() - t0 < 60


def test_criterion_04_tm_range():
    from blasiuscert.bounds import tm_range

    t0 = time.perf_counter()
    lo, hi = tm_range()
    assert compare("trunc:6", ref.TM_RANGE, (lo.lo, hi.hi))
    assert time.perf_counter() - t0 < 5


def test_criterion_05_table1():
    from sampling import sampled_table1_row

    from blasiuscert.energy import table1

    for rng, bounds in zip(data.SUBINTERVALS, table1()):
        claims = ref.TABLE1[bounds.interval_id]
        for claim, v in zip(claims, bounds.as_tuple()):
            assert compare("rel:0.005", claim, v), (bounds.interval_id, float(claim), v)
        sampled = sampled_table1_row(rng)
        for s, v in zip(sampled, bounds.as_tuple()):
            assert v >= s, (bounds.interval_id, v, s)


def test_criterion_06_table2_chain():
    from blasiuscert.energy import propagate_chain

    chain = propagate_chain("local", epsilons=data.EPSILONS)
    mismatches = []
    for st in chain.states:
        row = st.printed_row()
        for col in ("B0", "E", "E'", "E''"):
            claim = ref.TABLE2[st.interval_id][col]
            if not _digits5(claim, row[col]):
                mismatches.append((st.interval_id, col, float(claim), float(row[col])))
    for label, v in chain.published_labels().items():
        if not _digits5(ref.INNER_BOUNDS[label], v):
            mismatches.append(("final", label, float(ref.INNER_BOUNDS[label]), float(v)))
    assert not mismatches, mismatches


def test_criterion_07_far_field_constants():
    from blasiuscert.farfield import x_space_constants

    cf2, cf1, cf0 = x_space_constants()
    assert _digits5(ref.OUTER_CONSTANTS["C_F''"], cf2)
    assert _digits5(ref.OUTER_CONSTANTS["C_F'"], cf1)
    assert _digits5(ref.OUTER_CONSTANTS["C_F"], cf0)


def test_criterion_08_h0_norm():
    from blasiuscert.farfield import h0_norm_bound

    t0 = time.perf_counter()
    coarse = h0_norm_bound(step=0.02)
    fine = h0_norm_bound(step=0.01)
    elapsed = time.perf_counter() - t0
    assert fine.bound <= float(ref.H0_TARGET)
    assert coarse.bound <= float(ref.H0_TARGET)
    assert abs(coarse.bound - fine.bound) / fine.bound < 0.01
    assert elapsed < 120


def test_criterion_09_matching():
    from blasiuscert.matching import (
        MatchVector, alpha_grid, boundary_data, jacobian_norm, match_sweep, residual_norm,
    )

    bd = boundary_data(0)
    assert residual_norm(MatchVector.nominal(0), bd) <= float(ref.MATCH_RESIDUAL)
    assert jacobian_norm(0, bd).beta <= float(ref.MATCH_BETA * ref.MATCH_BETA_SLACK)
    t0 = time.perf_counter()
    results = match_sweep(alpha_grid())
    assert len(results) == 13
    for params, cert in results:
        assert cert.certified and cert.beta < 1
        assert params.in_trust_region()
    assert time.perf_counter() - t0 < 300


def test_criterion_10_oracle_containment():
    from blasiuscert.oracle import compare_envelope, fit_far_params, integrate_ivp

    t0 = time.perf_counter()
    rep = compare_envelope(n_points=25, x_max=10.0)
    assert len(rep.rows) == 5 * 25 * 3
    assert rep.passed, rep.violations[:5]
    a, _, _ = fit_far_params(integrate_ivp(0, x_end=15.0))
    assert abs(a - ref.A_NUM) <= 1e-4
    assert abs(a ** -1.5 - ref.WALL_STRESS) <= 1e-4
    assert time.perf_counter() - t0 < 120


def test_criterion_11_property_suites():
    import math
    from fractions import Fraction

    import mpmath

    from blasiuscert.exact import BiPoly, affine_rescale, cheb_coefficients, chebyshev_T, inverse_rescale
    from blasiuscert.report import RunConfig, verify
    from blasiuscert.special import I0_cert, q0_eval

    # exact round trips, zero tolerance
    p = BiPoly([[Fraction(1, 3), 2, 0], [0, Fraction(-5, 7), 1], [Fraction(1, 2), 0, 0], [0, 0, 3]])
    win_x, win_a = (Fraction(1, 4), Fraction(3, 2)), (Fraction(-3, 50), Fraction(3, 50))
    assert inverse_rescale(affine_rescale(p, win_x, win_a), win_x, win_a) == p
    r = cheb_coefficients(p)
    for xs, al in ((Fraction(1, 3), Fraction(-2, 5)), (Fraction(-7, 9), Fraction(1, 8))):
        total = sum(r[i][j] * chebyshev_T(i, xs) * chebyshev_T(j, al)
                    for i in range(len(r)) for j in range(len(r[0])))
        assert total == p(xs, al)

    # I0 derivative identity, 1e-8
    for t in (2.0, 4.0):
        h = 1e-4
        fd = (I0_cert(t + h).mid - I0_cert(t - h).mid) / (2 * h)
        i0 = I0_cert(t).mid
        assert math.isclose(fd, (1 + 1 / (2 * t)) * i0 - 1 / (2 * t), abs_tol=1e-8)

    # q0 two forms, 1e-8
    t, c = 2.0, 0.25
    I, J = I0_cert(t).mid, I0_cert(2 * t).mid
    q1, q2 = 2 * t * I, -t * I - t * I * I + 2 * t * J
    form_a = c * math.exp(-t) / math.sqrt(t) * q1 + c * c * math.exp(-2 * t) / t * q2
    form_b = 2 * c * math.sqrt(t) * math.exp(-t) * I + c * c * math.exp(-2 * t) * (2 * J - I - I * I)
    assert math.isclose(form_a, form_b, rel_tol=0, abs_tol=1e-15)
    assert math.isclose(q0_eval(t, c).mid, form_b, abs_tol=1e-8)
    with mpmath.workdps(30):
        i_mp = 1 - mpmath.sqrt(mpmath.pi * t) * mpmath.exp(t) * mpmath.erfc(mpmath.sqrt(t))
        assert abs(float(i_mp) - I) < 1e-8

    # report determinism, byte for byte
    cfg = RunConfig()
    first = verify(["ranges"], cfg).to_json()
    second = verify(["ranges"], cfg).to_json()
    assert first == second
