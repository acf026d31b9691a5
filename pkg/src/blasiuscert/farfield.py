"""Weighted-norm bounds for the far-field correction.

The first iterate of the far-field integral equation is

    h0(t) = int_t^oo sqrt(tau) e^tau R(tau) dtau
          = c^3 H3(t) + c^4 H4(t),
    Hk(t) = int_t^oo e^{-(k-1) tau} gk(tau) dtau,

with g3, g4 the exact kernels of sqrt(tau) R.  Each Hk is enclosed by a
backward sum of midpoint-rule panels whose remainder is bounded through an
interval enclosure of the integrand's second derivative, started from an
analytic tail bound at T_cap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpq

from . import data
from . import interval as iv
from .exact import Q
from .interval import Interval
from .special import FarPoly, I0_cert, h0_integrand_series

T_DEFAULT = 1.96
T_CAP = 40.0


class QuadratureError(ArithmeticError):
    """The certified quadrature did not produce a finite enclosure."""


@dataclass(frozen=True)
class WeightedFn:
    """Certified samples of t e^{2t}|h(t)| on a grid plus a bound beyond it."""

    t_grid: tuple[float, ...]
    values: tuple[Interval, ...]
    panel_sup: tuple[float, ...]
    tail_bound: float

    @property
    def sup(self) -> float:
        return max(max(self.panel_sup), self.tail_bound)


@dataclass(frozen=True)
class H0NormResult:
    bound: float
    T: float
    T_cap: float
    c_bound: float
    step: float
    H3: tuple[Interval, ...]
    H4: tuple[Interval, ...]
    weighted: WeightedFn

    def weighted_at(self, index: int, c) -> Interval:
        """t e^{2t} h0(t; c) at grid point ``index`` for a given c."""
        t = Interval(self.weighted.t_grid[index])
        C = Interval(c)
        h = C ** 3 * self.H3[index] + C ** 4 * self.H4[index]
        return t * iv.exp(2 * t) * h


def _grid(T: float, T_cap: float, step: float) -> list[float]:
    pts = [T]
    zones = ((T + 4.0, step), (14.0, 5 * step), (T_cap, 25 * step))
    for end, h in zones:
        end = min(end, T_cap)
        n = max(1, math.ceil((end - pts[-1]) / h - 1e-9)) if end > pts[-1] else 0
        start = pts[-1]
        for i in range(1, n + 1):
            pts.append(start + (end - start) * i / n)
    if pts[-1] < T_cap:
        pts.append(T_cap)
    return pts


@dataclass
class _Pt:
    s: Interval
    I: Interval
    J: Interval


def _point(t: float, acc: float) -> _Pt:
    T = Interval(t)
    return _Pt(iv.sqrt(T), I0_cert(t, acc).enclosure, I0_cert(2 * T, acc).enclosure)


def _kernels(k: int) -> tuple[FarPoly, FarPoly, FarPoly]:
    """g_k, (D - j) g_k and (D - j)^2 g_k with j = k - 1."""
    g = h0_integrand_series().parts.get(k, FarPoly())
    j = k - 1
    d1 = g.dt() - g * j
    d2 = d1.dt() - d1 * j
    return g, d1, d2


def tail_kernel_bound(k: int, T_cap: float) -> float:
    """Bound of |g_k(tau)| for tau >= T_cap.

    Uses 1/2 - 3/(4 tau) <= tau I0(tau) <= 1/2, valid because the Laplace
    representation of I0 has a completely monotone kernel, so its asymptotic
    partial sums alternate around the true value.  With u = 1/tau this gives
    |g3| <= u^3 and |g4| <= u^{4.5}/2.
    """
    u = 1 / Interval(T_cap)
    if k == 3:
        return (u ** 3).hi
    if k == 4:
        return (u ** 4 * iv.sqrt(u) / 2).hi
    raise ValueError("k must be 3 or 4")


def _check_tail_brackets(T_cap: float, acc: float) -> None:
    X = Interval(T_cap) * I0_cert(T_cap, acc).enclosure
    lo = 0.5 - 0.75 / T_cap
    if not (lo <= X.lo and X.hi <= 0.5):
        raise QuadratureError("asymptotic bracket of t I0(t) violated at T_cap")


def _component(k: int, grid: list[float], pts: list[_Pt], mids: list[_Pt], T_cap: float):
    """Backward enclosures of H_k at the grid and sup bounds of t e^{2t}|H_k| per panel."""
    g, d1, d2 = _kernels(k)
    j = k - 1
    n = len(grid) - 1
    tail = Interval(-1.0, 1.0) * tail_kernel_bound(k, T_cap) * iv.exp(Interval(-j * T_cap)) / j
    H = [Interval(0.0)] * (n + 1)
    H[n] = tail
    F_panel = [None] * n
    for i in range(n - 1, -1, -1):
        u, v = grid[i], grid[i + 1]
        h = Interval(v) - Interval(u)
        m = mids[i]
        tm = (Interval(u) + Interval(v)) / 2
        fm = iv.exp(-j * tm) * g(m.s, m.I, m.J)
        pan = Interval(u, v)
        ps = iv.sqrt(pan)
        pI = pts[i + 1].I.hull(pts[i].I)
        pJ = pts[i + 1].J.hull(pts[i].J)
        w = iv.exp(-j * pan)
        f2 = w * d2(ps, pI, pJ)
        F_panel[i] = w * g(ps, pI, pJ)
        H[i] = H[i + 1] + h * fm + h ** 3 / 24 * f2
    # weighted values phi = t e^{2t} |H| and a derivative-based sup per panel
    vals = []
    for i in range(n + 1):
        t = Interval(grid[i])
        vals.append(t * iv.exp(2 * t) * H[i])
    sups = []
    for i in range(n):
        u, v = grid[i], grid[i + 1]
        pan = Interval(u, v)
        h = Interval(v) - Interval(u)
        Hp = H[i + 1] + Interval(0.0).hull(h) * F_panel[i]
        dphi = iv.exp(2 * pan) * ((1 + 2 * pan) * Hp - pan * F_panel[i])
        edge = max(vals[i].mag, vals[i + 1].mag)
        sups.append((Interval(edge) + h / 2 * dphi.mag).hi)
    # beyond T_cap: t e^{2t} |H_k(t)| <= t sup|g_k| e^{-(j-2)t} / j
    tc = Interval(T_cap)
    tail_sup = (tc * tail_kernel_bound(k, T_cap) * iv.exp((2 - j) * tc) / j).hi
    return H, vals, sups, tail_sup


def h0_norm_bound(T: float = T_DEFAULT, c_bound=data.C_CEILING, T_cap: float = T_CAP,
                  step: float = 0.01, acc: float = 1e-13) -> H0NormResult:
    """Certified upper bound of sup_{t >= T, |c| <= c_bound} t e^{2t} |h0(t; c)|."""
    T = float(T)
    if T < T_DEFAULT:
        raise ValueError("T must be at least 1.96")
    if not T_cap > T:
        raise ValueError("T_cap must exceed T")
    cb = Interval(Q(c_bound))
    _check_tail_brackets(T_cap, acc)
    grid = _grid(T, T_cap, step)
    pts = [_point(t, acc) for t in grid]
    mids = [_point(0.5 * (u + v), acc) for u, v in zip(grid, grid[1:])]
    H3, v3, s3, tail3 = _component(3, grid, pts, mids, T_cap)
    H4, v4, s4, tail4 = _component(4, grid, pts, mids, T_cap)
    c3, c4 = cb ** 3, cb ** 4
    vals = tuple(c3 * abs(a) + c4 * abs(b) for a, b in zip(v3, v4))
    sups = tuple((c3 * Interval(a) + c4 * Interval(b)).hi for a, b in zip(s3, s4))
    tail = (c3 * Interval(tail3) + c4 * Interval(tail4)).hi
    wf = WeightedFn(tuple(grid), vals, sups, tail)
    bound = wf.sup
    if not math.isfinite(bound):
        raise QuadratureError("non-finite bound")
    return H0NormResult(bound, T, T_cap, float(cb.hi), step, tuple(H3), tuple(H4), wf)


@lru_cache(maxsize=4)
def cached_h0_norm(T: float = T_DEFAULT, T_cap: float = T_CAP, step: float = 0.01) -> H0NormResult:
    return h0_norm_bound(T=T, T_cap=T_cap, step=step)


# ---------------------------------------------------------------------------
# closed-form consequences of a weighted-norm bound

def epsilon_bounds(t, h_norm=data.H_NORM_CEILING) -> tuple[float, float, float]:
    """Bounds on |E|, |E' - E/(2t)| and |sqrt(t) E'' - E'/(2 sqrt t) + E/(2 t^{3/2})|."""
    T = Interval(t)
    if T.lo < 1.96:
        raise ValueError("t must be at least 1.96")
    hn = Interval(Q(h_norm))
    e3 = iv.exp(-3 * T)
    t32 = T * iv.sqrt(T)
    return ((hn * e3 / (9 * t32)).hi, (hn * e3 / (3 * t32)).hi, (hn * e3 / T).hi)


def x_space_constants(a_sup=None, h_norm=data.H_NORM_CEILING) -> tuple[float, float, float]:
    """(C_F'', C_F', C_F) of the outer error radii."""
    if a_sup is None:
        a_sup = sup_a()
    a = Interval(Q(a_sup))
    hn = Interval(Q(h_norm))
    c2 = iv.sqrt(Interval(2.0)) * a * iv.sqrt(a) * hn
    c1 = a / 3 * hn
    c0 = iv.sqrt(a / 2) / 9 * hn
    return (c2.hi, c1.hi, c0.hi)


def sup_a(rho=data.RHO0) -> mpq:
    """sup over J of a0(alpha) + rho; a0 is decreasing on J so it sits at alpha = -3/50."""
    from .quasi import nominal_params

    a0_lo = nominal_params(data.ALPHA_MIN)[0]
    a0_hi = nominal_params(data.ALPHA_MAX)[0]
    # the vertex of the quadratic a0 lies outside J; confirm monotonicity
    c = data.A0_COEFFS
    vertex = -c[1] / (2 * c[2])
    if data.ALPHA_MIN <= vertex <= data.ALPHA_MAX:
        raise ArithmeticError("a0 is not monotone on J")
    return max(a0_lo, a0_hi) + Q(rho)


def norm_integral_check(h_norm, tau) -> float:
    """(1/3) tau^{-3/2} e^{-3 tau} h_norm, the bound on int_tau^oo s^{-1/2} e^{-s} h(s) ds."""
    T = Interval(tau)
    if T.lo < 1.96:
        raise ValueError("tau must be at least 1.96")
    return (Interval(Q(h_norm)) * iv.exp(-3 * T) / (3 * T * iv.sqrt(T))).hi
