"""High-precision, non-rigorous reference solution of F''' + F F'' = 0.

The integrator advances a truncated Taylor series whose coefficients follow
from the recurrence

    (n+1)(n+2)(n+3) f_{n+3} = - sum_i f_i (n-i+1)(n-i+2) f_{n-i+2},

choosing each step so that the last retained terms fall below the requested
tolerance.  Every step keeps its coefficients, so evaluation anywhere on the
trajectory is a local polynomial evaluation.  Nothing in the certified path
depends on this module.
"""
from __future__ import annotations

import bisect
import time
from dataclasses import dataclass, field

import mpmath

from . import data
from .exact import Q
from .quasi import QUANTITIES, _check_alpha, eval_with_envelope, nominal_params, t_of_x
from .special import V_series, mp_eval_series

DPS = 40
ORDER = 32
X_END_MAX = 30


class OracleError(ArithmeticError):
    """The reference integration or fit did not behave."""


def _mpf(v):
    if hasattr(v, "numerator") and not isinstance(v, (int, float)):
        return mpmath.mpf(int(v.numerator)) / int(v.denominator)
    return mpmath.mpf(v)


def taylor_coeffs(F0, F1, F2, order: int = ORDER) -> list:
    f = [F0, F1, F2 / 2]
    for n in range(order - 2):
        conv = mpmath.fsum(f[i] * (n - i + 1) * (n - i + 2) * f[n - i + 2] for i in range(n + 1))
        f.append(-conv / ((n + 1) * (n + 2) * (n + 3)))
    return f


@dataclass
class _Step:
    x0: object
    h: object
    coeffs: list
    integral0: object  # int_0^{x0} F


@dataclass
class Trajectory:
    alpha: float
    x_end: float
    tol: float
    steps: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    def _locate(self, x) -> _Step:
        x = _mpf(x)
        if x < 0 or x > self.steps[-1].x0 + self.steps[-1].h * (1 + mpmath.mpf(10) ** (-DPS + 5)):
            raise ValueError(f"x={float(x):g} outside the trajectory [0, {self.x_end:g}]")
        starts = [s.x0 for s in self.steps]
        i = max(0, bisect.bisect_right(starts, x) - 1)
        return self.steps[i]

    def eval_mp(self, x, order: int = 0):
        """F^(order)(x) as an mpf."""
        with mpmath.workdps(DPS):
            st = self._locate(x)
            u = _mpf(x) - st.x0
            c = st.coeffs
            for _ in range(order):
                c = [k * c[k] for k in range(1, len(c))]
            return mpmath.polyval(c[::-1], u)

    def eval(self, x, order: int = 0) -> float:
        return float(self.eval_mp(x, order))

    def integral(self, x) -> float:
        """int_0^x F."""
        with mpmath.workdps(DPS):
            st = self._locate(x)
            u = _mpf(x) - st.x0
            prim = [0] + [c / (k + 1) for k, c in enumerate(st.coeffs)]
            return st.integral0 + mpmath.polyval(prim[::-1], u)

    def samples(self, xs) -> list[tuple[float, float, float, float]]:
        return [(float(x), self.eval(x), self.eval(x, 1), self.eval(x, 2)) for x in xs]


def integrate_ivp(alpha, x_end: float = 15.0, tol: float = 1e-20, order: int = ORDER,
                  h_max: float = 0.5, h_min: float = 1e-6) -> Trajectory:
    """F(0) = alpha, F'(0) = 0, F''(0) = 1 integrated to x_end."""
    aq = _check_alpha(alpha)
    if not 0 < x_end <= X_END_MAX:
        raise ValueError(f"x_end must lie in (0, {X_END_MAX}]")
    t0 = time.perf_counter()
    traj = Trajectory(float(aq), float(x_end), tol)
    with mpmath.workdps(DPS):
        X = mpmath.mpf(x_end)
        x = mpmath.mpf(0)
        state = [_mpf(aq), mpmath.mpf(0), mpmath.mpf(1)]
        integ = mpmath.mpf(0)
        tol_mp = mpmath.mpf(tol)
        while x < X:
            c = taylor_coeffs(*state, order=order)
            # step from the size of the last two coefficients
            tail = max(abs(c[-1]), abs(c[-2]), mpmath.mpf(10) ** (-DPS))
            h = min(mpmath.mpf(h_max), 0.5 * (tol_mp / tail) ** (mpmath.mpf(1) / (order - 1)), X - x)
            if h < h_min and X - x > h_min:
                raise OracleError(f"step underflow at x={float(x):.6g} (h={float(h):.3g})")
            traj.steps.append(_Step(x, h, c, integ))
            prim = [0] + [ck / (k + 1) for k, ck in enumerate(c)]
            integ = integ + mpmath.polyval(prim[::-1], h)
            d1 = [k * c[k] for k in range(1, len(c))]
            d2 = [k * d1[k] for k in range(1, len(d1))]
            state = [mpmath.polyval(p[::-1], h) for p in (c, d1, d2)]
            if state[2] <= 0:
                raise OracleError(f"F'' lost positivity at x={float(x + h):.6g}")
            x = x + h
    traj.runtime = time.perf_counter() - t0
    return traj


def _t(x, a, b):
    return (a * x + b) ** 2 / (2 * a)


def fit_far_params(traj, stations=(6.0, 7.0), rel_tol: float = 1e-8) -> tuple[float, float, float]:
    """(a, b, c) from the far-field form F = a x + b + exponentially small terms.

    ``traj`` needs ``x_end`` and ``eval_mp(x, order)`` (or ``eval``).  a and b
    are read at two stations near the end and must agree; c is solved from
    F'' = sqrt(2) a^{3/2} c e^{-t} V(t; c) at two interior stations.
    """
    ev = getattr(traj, "eval_mp", None) or traj.eval
    x_end = float(traj.x_end)
    if x_end < 15:
        raise ValueError("the trajectory must reach x >= 15")
    with mpmath.workdps(DPS):
        xs = (mpmath.mpf(x_end) - 1, mpmath.mpf(x_end))
        As = [mpmath.mpf(ev(x, 1)) for x in xs]
        Bs = [mpmath.mpf(ev(x, 0)) - A * x for A, x in zip(As, xs)]
        a, b = As[-1], Bs[-1]
        if abs(As[0] - As[1]) > rel_tol * abs(a) or abs(Bs[0] - Bs[1]) > rel_tol * max(1, abs(b)):
            raise OracleError("far-field slope or intercept not converged")
        cs = []
        V = V_series()
        for xc in stations:
            t = _t(mpmath.mpf(xc), a, b)
            F2 = mpmath.mpf(ev(xc, 2))
            base = mpmath.exp(t) * F2 / (mpmath.sqrt(2) * a ** mpmath.mpf(1.5))
            c = base
            for _ in range(50):
                nxt = base / mp_eval_series(V, t, c)
                if abs(nxt - c) <= mpmath.mpf(10) ** (-DPS + 8):
                    c = nxt
                    break
                c = nxt
            cs.append(c)
        if abs(cs[0] - cs[1]) > rel_tol * max(abs(cs[1]), mpmath.mpf(1e-12)) and abs(cs[1]) > 1e-14:
            raise OracleError("c fit not converged across stations")
        return float(a), float(b), float(cs[-1])


def numeric_wall_stress(traj) -> float:
    a, _, _ = fit_far_params(traj)
    return a ** -1.5


# ---------------------------------------------------------------------------
# envelope comparison

@dataclass(frozen=True)
class ContainmentRow:
    alpha: float
    x: float
    quantity: str
    oracle: float
    centre: float
    radius: float

    @property
    def utilization(self) -> float:
        return abs(self.oracle - self.centre) / self.radius if self.radius else float("inf")

    @property
    def contained(self) -> bool:
        return abs(self.oracle - self.centre) <= self.radius


@dataclass
class EnvelopeReport:
    rows: list[ContainmentRow]

    @property
    def violations(self) -> list[ContainmentRow]:
        return [r for r in self.rows if not r.contained]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def max_utilization(self) -> float:
        return max(r.utilization for r in self.rows)

    def max_deviation(self, quantity: str) -> float:
        return max(abs(r.oracle - r.centre) for r in self.rows if r.quantity == quantity)


ENVELOPE_ALPHAS = ("-3/50", "-3/100", "0", "3/100", "3/50")


def compare_envelope(alphas=ENVELOPE_ALPHAS, n_points: int = 25, x_max: float = 10.0,
                     inner=None, matched=None) -> EnvelopeReport:
    """Check oracle (F, F', F'') against the certified envelopes."""
    from .matching import solve_match

    rows = []
    for al in alphas:
        aq = Q(al)
        traj = integrate_ivp(aq, x_end=max(15.0, x_max))
        params = matched[al] if matched else solve_match(aq)[0]
        for i in range(n_points):
            x = Q(x_max) * i / (n_points - 1)
            env = eval_with_envelope(x, aq, matched=params, inner=inner)
            for order, name in enumerate(QUANTITIES):
                cv = env[name]
                rows.append(ContainmentRow(float(aq), float(x), name, traj.eval(x, order), cv.value, cv.radius))
    return EnvelopeReport(rows)


def nominal_wall_stress(alpha=0) -> float:
    return float(nominal_params(alpha)[0]) ** -1.5
