"""Plain-float sampling of the energy-bound integrands, used as an oracle."""
from __future__ import annotations

import math

from blasiuscert import data
from blasiuscert.quasi import build_inner


def float_poly(p, alpha: float) -> list[float]:
    """Coefficients in x of p(., alpha) as floats, lowest degree first."""
    return [float(v) for v in p.at_alpha(alpha).univariate_x()]


def horner(c: list[float], x: float) -> float:
    acc = 0.0
    for v in reversed(c):
        acc = acc * x + v
    return acc


def simpson(f, lo: float, hi: float, n: int) -> float:
    if n % 2:
        n += 1
    h = (hi - lo) / n
    s = f(lo) + f(hi)
    s += 4 * sum(f(lo + (2 * i - 1) * h) for i in range(1, n // 2 + 1))
    s += 2 * sum(f(lo + 2 * i * h) for i in range(1, n // 2))
    return s * h / 3


def sampled_table1_row(interval, n_alpha: int = 100, n_x: int = 100) -> tuple[float, float, float, float]:
    """Largest (M, M1, M2, M3) over an alpha sample of J, each integral by Simpson.

    The integrands use the exact weight (x - x_l)^4 F0''/4 plus the positive
    part of the matching G function, so n_alpha * n_x points are sampled.
    """
    inner = build_inner()
    xl, xr = (float(v) for v in interval)
    amin, amax = float(data.ALPHA_MIN), float(data.ALPHA_MAX)
    best = [0.0, 0.0, 0.0, 0.0]
    for i in range(n_alpha):
        al = amin + (amax - amin) * i / (n_alpha - 1)
        f2 = float_poly(inner.F0pp, al)
        f1 = float_poly(inner.F0p, al)
        gs = {g: float_poly(getattr(inner, g), al) for g in ("G1", "G2", "G3")}

        def q(g):
            return lambda x: (x - xl) ** 4 / 4 * horner(f2, x) + max(horner(gs[g], x), 0.0)

        iq = simpson(q("G3"), xl, xr, n_x)
        iq1 = simpson(q("G1"), xl, xr, n_x)
        iq2 = simpson(q("G2"), xl, xr, n_x)
        moment = simpson(lambda x: (x - xl) ** 2 * horner(f2, x), xl, xr, n_x)
        d1 = horner(f1, xr) - horner(f1, xl)
        row = (
            math.sqrt(xr - xl) * math.exp(iq / 2),
            math.sqrt(d1) * math.exp(iq1 / 2),
            math.sqrt(moment) * math.exp(iq1 / 2),
            math.exp(iq2 / 2),
        )
        best = [max(b, r) for b, r in zip(best, row)]
    return tuple(best)
