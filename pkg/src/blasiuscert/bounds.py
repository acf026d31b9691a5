"""Certified ranges of bivariate polynomials over grids of (x, alpha) cells."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from gmpy2 import mpq

from . import data
from .exact import (
    BiPoly,
    Q,
    RInterval,
    _refine_root,
    affine_rescale,
    cheb_expand,
    cubic_extrema,
    l1_tail,
    poly1_deriv,
    poly1_eval,
    round_dec,
    round_sig,
)

Window = tuple[mpq, mpq]
_CUBIC_GROUPS = tuple((m, 0) for m in range(4)) + tuple((0, n) for n in range(1, 4))


@dataclass(frozen=True)
class SubregionGrid:
    x_knots: tuple[mpq, ...] = data.X_KNOTS
    alpha_knots: tuple[mpq, ...] = data.ALPHA_KNOTS

    def __post_init__(self):
        xs = tuple(Q(v) for v in self.x_knots)
        al = tuple(Q(v) for v in self.alpha_knots)
        for name, ks in (("x", xs), ("alpha", al)):
            if len(ks) < 2 or any(b <= a for a, b in zip(ks, ks[1:])):
                raise ValueError(f"{name} knots must be strictly increasing")
        if xs[0] != 0 or xs[-1] != data.X_MATCH:
            raise ValueError("x knots must span [0, 5/2]")
        if al[0] != data.ALPHA_MIN or al[-1] != data.ALPHA_MAX:
            raise ValueError("alpha knots must span [-3/50, 3/50]")
        object.__setattr__(self, "x_knots", xs)
        object.__setattr__(self, "alpha_knots", al)

    @staticmethod
    def _breaks(knots, lo, hi) -> list[mpq]:
        inner = [k for k in knots if lo < k < hi]
        return [lo] + inner + [hi]

    def x_windows(self, lo, hi) -> list[Window]:
        lo, hi = Q(lo), Q(hi)
        if not hi > lo:
            raise ValueError("empty region")
        b = self._breaks(self.x_knots, lo, hi)
        return list(zip(b, b[1:]))

    def alpha_windows(self, lo=data.ALPHA_MIN, hi=data.ALPHA_MAX) -> list[Window]:
        lo, hi = Q(lo), Q(hi)
        if not hi > lo:
            raise ValueError("empty region")
        b = self._breaks(self.alpha_knots, lo, hi)
        return list(zip(b, b[1:]))

    def cells(self, x_range, alpha_range=(data.ALPHA_MIN, data.ALPHA_MAX)) -> list[tuple[Window, Window]]:
        return [(xw, aw) for xw in self.x_windows(*x_range) for aw in self.alpha_windows(*alpha_range)]


DEFAULT_GRID = SubregionGrid()


@dataclass(frozen=True)
class RangeReport:
    region: str
    method: str
    lower: mpq
    upper: mpq

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")

    @property
    def sup_abs(self) -> mpq:
        return max(abs(self.lower), abs(self.upper))

    def outward_sig(self, digits: int = 5) -> tuple[float, float]:
        return (float(round_sig(self.lower, digits, "down")), float(round_sig(self.upper, digits, "up")))

    def outward_dec(self, decimals: int = 4) -> tuple[float, float]:
        return (float(round_dec(self.lower, decimals, "down")), float(round_dec(self.upper, decimals, "up")))


# ---------------------------------------------------------------------------
# Taylor (cubic + l1 tail) method

@lru_cache(maxsize=4096)
def taylor_cell(f: BiPoly, x_window: Window, alpha_window: Window) -> tuple[mpq, mpq]:
    """Certified (lower, upper) of f over one cell."""
    g = affine_rescale(f, x_window, alpha_window)
    cx = [g.coeff(m, 0) for m in range(4)]
    ca = [mpq(0)] + [g.coeff(0, n) for n in range(1, 4)]
    tail = l1_tail(g, _CUBIC_GROUPS)
    mn_x, mx_x = cubic_extrema(cx)
    mn_a, mx_a = cubic_extrema(ca)
    return mn_x.lo + mn_a.lo - tail, mx_x.hi + mx_a.hi + tail


def _taylor_job(args):
    f, xw, aw = args
    return taylor_cell(f, xw, aw)


def taylor_cells(f: BiPoly, cells: Sequence[tuple[Window, Window]], jobs: int = 1) -> list[tuple[mpq, mpq]]:
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_taylor_job, [(f, xw, aw) for xw, aw in cells]))
    return [taylor_cell(f, xw, aw) for xw, aw in cells]


def taylor_bound(f: BiPoly, x_range=(0, data.X_MATCH), alpha_range=(data.ALPHA_MIN, data.ALPHA_MAX),
                 grid: SubregionGrid = DEFAULT_GRID, region: str = "", jobs: int = 1) -> RangeReport:
    """Min/max over the grid cells covering x_range x alpha_range."""
    cells = grid.cells(x_range, alpha_range)
    if not cells:
        raise ValueError("empty region")
    res = taylor_cells(f, cells, jobs)
    lo = min(r[0] for r in res)
    hi = max(r[1] for r in res)
    return RangeReport(region or _region_name(x_range), "taylor", lo, hi)


def _region_name(x_range) -> str:
    lo, hi = (Q(v) for v in x_range)
    for k, (a, b) in enumerate(data.SUBINTERVALS, 1):
        if (a, b) == (lo, hi):
            return f"I{k}"
    if (lo, hi) == (0, data.X_MATCH):
        return "I"
    return f"[{float(lo):g},{float(hi):g}]"


# ---------------------------------------------------------------------------
# Chebyshev method

@lru_cache(maxsize=1024)
def cheb_window(f: BiPoly, x_window: Window, alpha_window: Window) -> mpq:
    r = cheb_expand(f, x_window, alpha_window)
    return sum((abs(v) for row in r for v in row), mpq(0))


def cheb_bound(f: BiPoly, windows: Iterable[tuple[Window, Window]] | None = None,
               x_range=None, grid: SubregionGrid = DEFAULT_GRID) -> mpq:
    """Upper bound on sup|f| as the largest Chebyshev l1 sum over the windows.

    With ``x_range`` the windows are the x-knot cells inside it, each taken
    over the full alpha interval.
    """
    if windows is None:
        if x_range is None:
            windows = [((mpq(0), data.X_MATCH), (data.ALPHA_MIN, data.ALPHA_MAX))]
        else:
            windows = [(xw, (data.ALPHA_MIN, data.ALPHA_MAX)) for xw in grid.x_windows(*x_range)]
    return max(cheb_window(f, (Q(xw[0]), Q(xw[1])), (Q(aw[0]), Q(aw[1]))) for xw, aw in windows)


# ---------------------------------------------------------------------------
# tables

def range_tables(inner=None, grid: SubregionGrid = DEFAULT_GRID, jobs: int = 1) -> list[RangeReport]:
    """F0, F0' and F0'' over I1..I4 x J."""
    from .quasi import build_inner

    inner = inner or build_inner()
    out = []
    for name, order in (("F0", 0), ("F0'", 1), ("F0''", 2)):
        f = inner.derivative(order)
        for k, rng in enumerate(data.SUBINTERVALS, 1):
            rep = taylor_bound(f, rng, grid=grid, jobs=jobs)
            out.append(RangeReport(f"{name}:I{k}", "taylor", rep.lower, rep.upper))
    return out


def residual_taylor_table(inner=None, grid: SubregionGrid = DEFAULT_GRID, jobs: int = 1) -> list[RangeReport]:
    from .quasi import build_inner

    inner = inner or build_inner()
    return [taylor_bound(inner.R, rng, grid=grid, jobs=jobs) for rng in data.SUBINTERVALS]


# ---------------------------------------------------------------------------
# sign change

@dataclass(frozen=True)
class SignChangeProof:
    certified: bool
    reason: str
    bracket: Window
    sign_before: int = 0
    pre_bracket: RangeReport | None = None
    derivative: RangeReport | None = None
    at_left: RangeReport | None = None
    at_right: RangeReport | None = None


def _sign(rep: RangeReport) -> int:
    if rep.lower > 0:
        return 1
    if rep.upper < 0:
        return -1
    return 0


def _alpha_range_at(g: BiPoly, x0: mpq, grid: SubregionGrid) -> RangeReport:
    h = g.at_x(x0)
    # h is constant in x; any x window yields its alpha-range
    res = [taylor_cell(h, (mpq(0), mpq(1)), aw) for aw in grid.alpha_windows()]
    return RangeReport(f"x={float(x0):g}", "taylor", min(r[0] for r in res), max(r[1] for r in res))


def verify_sign_change(g: BiPoly, bracket, monotone_region=None, grid: SubregionGrid = DEFAULT_GRID) -> SignChangeProof:
    """Certify a unique simple zero of g(., alpha) inside ``bracket`` for every alpha in J.

    Three facts are checked: g keeps one sign on [0, x_lo]; g' keeps the
    opposite sign on ``monotone_region`` (default [x_lo, 5/2]); and g has
    opposite certified signs at x_lo and x_hi.
    """
    lo, hi = Q(bracket[0]), Q(bracket[1])
    if not (0 <= lo < hi <= data.X_MATCH):
        raise ValueError("bracket must lie inside [0, 5/2]")
    mono = tuple(Q(v) for v in (monotone_region or (lo, data.X_MATCH)))
    if mono[0] > lo or mono[1] < hi:
        return SignChangeProof(False, "monotone region does not cover the bracket", (lo, hi))
    left = _alpha_range_at(g, lo, grid)
    right = _alpha_range_at(g, hi, grid)
    s = _sign(left)
    if s == 0:
        return SignChangeProof(False, "cannot certify the sign at the left end", (lo, hi), at_left=left, at_right=right)
    pre = None
    if lo > 0:
        pre = taylor_bound(g, (0, lo), grid=grid)
        if _sign(pre) != s:
            return SignChangeProof(False, "cannot certify a fixed sign before the bracket", (lo, hi), s, pre, at_left=left, at_right=right)
    deriv = taylor_bound(g.diff_x(), mono, grid=grid)
    if _sign(deriv) != -s:
        return SignChangeProof(False, "cannot certify monotonicity past the bracket", (lo, hi), s, pre, deriv, left, right)
    if _sign(right) != -s:
        return SignChangeProof(False, "cannot certify the sign at the right end", (lo, hi), s, pre, deriv, left, right)
    return SignChangeProof(True, "unique zero in bracket", (lo, hi), s, pre, deriv, left, right)


def root_enclosure(g: BiPoly, alpha, proof: SignChangeProof, width=mpq(1, 10**15)) -> RInterval:
    """Exact bisection enclosure of the zero of g(., alpha) inside a certified bracket."""
    if not proof.certified:
        raise ValueError("sign change not certified")
    c = g.at_alpha(Q(alpha)).univariate_x()
    return _refine_root(c, proof.bracket[0], proof.bracket[1], Q(width))


# ---------------------------------------------------------------------------
# alpha-monotonicity

@dataclass(frozen=True)
class MonotonicityEntry:
    name: str
    x_range: Window
    anchor: mpq
    factored_power: int
    upper: mpq | None
    certified: bool


@dataclass(frozen=True)
class MonotonicityProof:
    certified: bool
    entries: tuple[MonotonicityEntry, ...]

    def failures(self) -> list[MonotonicityEntry]:
        return [e for e in self.entries if not e.certified]


def _monotone_entry(name: str, f: BiPoly, x_range, anchor, grid: SubregionGrid) -> MonotonicityEntry:
    lo, hi = (Q(v) for v in x_range)
    anchor = Q(anchor)
    d = f.diff_alpha()
    if d.is_zero():
        return MonotonicityEntry(name, (lo, hi), anchor, 0, None, False)
    # alpha-derivative in y = x - anchor, with any forced zero at y = 0 factored out
    ds = d.substitute_x(anchor, 1)
    k = ds.x_valuation()
    quot = ds.divide_x_power(k)
    if k % 2 and lo < anchor:
        return MonotonicityEntry(name, (lo, hi), anchor, k, None, False)
    windows = [(a - anchor, b - anchor) for a, b in grid.x_windows(lo, hi)]
    cells = [(xw, aw) for xw in windows for aw in grid.alpha_windows()]
    upper = max(taylor_cell(quot, xw, aw)[1] for xw, aw in cells)
    return MonotonicityEntry(name, (lo, hi), anchor, k, upper, upper < 0)


def verify_alpha_monotonicity(functions=None, grid: SubregionGrid = DEFAULT_GRID) -> MonotonicityProof:
    """Certify that each function strictly decreases in alpha over its x-range.

    ``functions`` is a list of ``(name, poly, x_range, anchor)``; the default
    is the list used by the energy estimates.  A zero of the alpha-derivative
    at the anchor (where the function is alpha-independent by construction)
    is factored out before bounding.
    """
    if functions is None:
        functions = default_monotone_functions()
    entries = tuple(_monotone_entry(n, f, rng, anchor, grid) for n, f, rng, anchor in functions)
    return MonotonicityProof(all(e.certified for e in entries), entries)


def default_monotone_functions():
    from .quasi import build_inner

    inner = build_inner()
    whole = (mpq(0), data.X_MATCH)
    out = []
    for k, (xl, xr) in enumerate(data.SUBINTERVALS, 1):
        delta = inner.F0p - inner.F0p.at_x(xl)
        out.append((f"F0'(x)-F0'(x_l) on I{k}", delta, (xl, xr), xl))
    out.append(("F0''", inner.F0pp, whole, mpq(0)))
    # past its bracket each G is negative for every alpha, so only the
    # stretch up to the bracket's right end decides where max(G, 0) peaks
    for name, (_, hi) in data.SIGN_BRACKETS.items():
        out.append((name, getattr(inner, name), (mpq(0), hi), mpq(0)))
    return out


# ---------------------------------------------------------------------------
# t_m range

def _quad(cs, alpha):
    return poly1_eval(list(cs), alpha)


def tm_range(rho=data.RHO0, x=data.X_MATCH) -> tuple[RInterval, RInterval]:
    """Enclosures of inf and sup over J of t(5/2) at the S_alpha corners.

    phi(alpha) = (x a + b)^2 / (2a) with (a, b) = (a0 - rho, b0 - 2 rho) for the
    infimum and (a0 + rho, b0 + 2 rho) for the supremum.  Critical points
    solve N (2 N' a - N a') = 0 where N = x a + b.
    """
    rho, x = Q(rho), Q(x)
    out = []
    for sgn, pick in ((-1, min), (1, max)):
        a = list(data.A0_COEFFS)
        b = list(data.B0_COEFFS)
        a[0] += sgn * rho
        b[0] += sgn * 2 * rho
        N = [x * a[i] + b[i] for i in range(3)]
        dN, da = poly1_deriv(N), poly1_deriv(a)
        # 2 N' a - N a'  (degree <= 2)
        crit = [mpq(0)] * 3
        for i, u in enumerate(dN):
            for j, v in enumerate(a):
                if i + j < 3:
                    crit[i + j] += 2 * u * v
        for i, u in enumerate(N):
            for j, v in enumerate(da):
                if i + j < 3:
                    crit[i + j] -= u * v
        candidates = [RInterval.point(data.ALPHA_MIN), RInterval.point(data.ALPHA_MAX)]
        for poly in (N, crit):
            candidates.extend(_roots_in(poly, data.ALPHA_MIN, data.ALPHA_MAX))

        def phi(al):
            n = poly1_eval(N, al)
            return n * n / (2 * poly1_eval(a, al))

        vals = [phi(c) for c in candidates]
        if pick is min:
            out.append(RInterval(min(v.lo for v in vals), min(v.hi for v in vals)))
        else:
            out.append(RInterval(max(v.lo for v in vals), max(v.hi for v in vals)))
    return out[0], out[1]


def _roots_in(c: Sequence[mpq], lo: mpq, hi: mpq, width=mpq(1, 10**30)) -> list[RInterval]:
    """Enclosures of the real roots of a polynomial of degree <= 2 inside [lo, hi]."""
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    if len(c) <= 1:
        return []
    pts = [lo, hi]
    if len(c) == 3:
        v = -c[1] / (2 * c[2])
        if lo < v < hi:
            pts.insert(1, v)
    out = []
    for u, w in zip(pts, pts[1:]):
        fu, fw = poly1_eval(c, u), poly1_eval(c, w)
        if fu == 0:
            out.append(RInterval.point(u))
        elif fu * fw < 0:
            out.append(_refine_root(c, u, w, width))
    if poly1_eval(c, hi) == 0:
        out.append(RInterval.point(hi))
    return out
