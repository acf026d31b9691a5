from __future__ import annotations

import pytest
from gmpy2 import mpq

from blasiuscert import data
from blasiuscert import reference as ref
from blasiuscert.interval import Interval
from blasiuscert.matching import (
    NO_H, Boundary, HCeiling, MatchVector, N_map, alpha_grid, ball_box, boundary_data,
    frobenius_bound, jacobian_norm, match_sweep, raw_partials, residual_norm, solve_match,
)
from blasiuscert.quasi import DomainError, nominal_params


@pytest.fixture(scope="module")
def sweep():
    return match_sweep(alpha_grid())


@pytest.fixture(scope="module")
def at_zero():
    return solve_match(0)


def _point(v) -> Interval:
    return Interval(float(v))


def test_linear_far_field_is_a_fixed_point():
    a, b = 1.65, -1.565
    bd = Boundary(_point(a * 2.5 + b), _point(a), _point(0.0))
    n1, n2_half, n3_half = N_map((a, b, 0.0), bd, NO_H)
    assert n1.lo <= a <= n1.hi
    assert n2_half.lo <= b / 2 <= n2_half.hi
    assert n3_half.mag < 1e-300


def test_t_outside_window_is_rejected():
    bd = Boundary(_point(4.0), _point(2.0), _point(0.0))
    with pytest.raises(DomainError):
        N_map((2.0, -1.0, 0.0), bd, NO_H)


def test_residual_at_nominal_point():
    res = residual_norm(MatchVector.nominal(0), boundary_data(0))
    assert res <= float(ref.MATCH_RESIDUAL)


def test_beta_at_zero():
    jb = jacobian_norm(0)
    assert jb.contracts
    assert jb.beta <= float(ref.MATCH_BETA * ref.MATCH_BETA_SLACK)
    assert set(jb.entries) == {f"{v}N{i}" for v in "abc" for i in (1, 2, 3)}


def test_frobenius_of_zero_partials():
    zero = [[Interval(0.0)] * 3 for _ in range(3)]
    jb = frobenius_bound(zero)
    assert jb.beta < 1e-100 and jb.contracts


def test_partials_against_finite_differences():
    a0, b0, c0 = (float(v) for v in nominal_params(0))
    bd = Boundary(*(Interval(v.mid) for v in (boundary_data(0).F, boundary_data(0).Fp, boundary_data(0).Fpp)))
    P = raw_partials(a0, b0, c0, bd, NO_H)

    def n(a, b, c):
        n1, n2, n3 = N_map((a, b, c), bd, NO_H)
        return n1.mid, 2 * n2.mid, 2 * n3.mid

    h = 1e-6
    for j, (da, db, dc) in enumerate(((h, 0, 0), (0, h, 0), (0, 0, h))):
        up = n(a0 + da, b0 + db, c0 + dc)
        dn = n(a0 - da, b0 - db, c0 - dc)
        for i in range(3):
            fd = (up[i] - dn[i]) / (2 * h)
            # the t-derivative of h/c keeps the residual forcing of h even when
            # h itself is switched off, so the N3 entries carry a small offset
            tol = 2e-5 if i == 2 and j < 2 else 1e-7
            assert P[i][j].mid == pytest.approx(fd, rel=1e-5, abs=tol), (i, j)


def test_widths_shrink_with_halved_radii():
    radii = {k: v / 2 for k, v in data.INNER_RADII.items()}
    full = N_map(MatchVector.nominal(0), boundary_data(0))
    half = N_map(MatchVector.nominal(0), boundary_data(0, radii))
    for f, g in zip(full, half):
        assert g.width <= f.width
        assert g.lo >= f.lo and g.hi <= f.hi


def test_h_ceiling_widens_the_map():
    A = MatchVector.nominal(0)
    bd = boundary_data(0)
    with_h = N_map(A, bd, HCeiling())
    without = N_map(A, bd, NO_H)
    assert all(w.width >= v.width for w, v in zip(with_h, without))


def test_solution_at_zero(at_zero):
    params, cert = at_zero
    assert cert.certified and params.certified
    a0, b0, c0 = (float(v) for v in nominal_params(0))
    assert abs(params.a - a0) < 5e-4 and abs(params.b - b0) < 5e-4 and abs(params.c - c0) < 5e-4
    assert abs(params.a - ref.A_NUM) < 1e-4
    assert cert.radius == pytest.approx(cert.final_residual / (1 - cert.beta))
    tm = params.t_match()
    assert 1.962257 < tm.lo and tm.hi < 2.043220


def test_solution_is_a_fixed_point(at_zero):
    params, cert = at_zero
    bd = boundary_data(0)
    centre = Boundary(Interval(bd.F.mid), Interval(bd.Fp.mid), Interval(bd.Fpp.mid))
    N = N_map(cert.A_star, centre, NO_H)
    assert max(abs(x - n.mid) for x, n in zip(cert.A_star.as_tuple(), N)) < 1e-9


def test_sweep_certifies_every_grid_point(sweep):
    assert len(sweep) == 13
    for params, cert in sweep:
        assert cert.beta < 1 and cert.certified
        assert params.in_trust_region()


def test_beta_is_continuous_in_alpha(sweep):
    betas = {cert.alpha: cert.beta for _, cert in sweep}
    assert abs(betas[-0.06] - betas[0.0]) < 0.15
    assert abs(betas[0.06] - betas[0.0]) < 0.15


def test_a_decreases_with_alpha(sweep):
    for (p, c), (q, d) in zip(sweep, sweep[1:]):
        assert q.a < p.a + 2 * (c.radius + d.radius)


def test_grid_is_exact():
    g = alpha_grid()
    assert g[0] == data.ALPHA_MIN and g[-1] == data.ALPHA_MAX and g[6] == 0
    assert isinstance(g[3], type(mpq(1)))


def test_ball_box_contains_nominal():
    a, b, c = ball_box(0)
    a0, b0, c0 = (float(v) for v in nominal_params(0))
    assert a0 in a and b0 in b and c0 in c
    assert b.width == pytest.approx(2 * a.width, rel=1e-9)


def test_outside_J_rejected():
    with pytest.raises(DomainError):
        solve_match(mpq(1, 10))
