"""Exact rational scalars, rational intervals and bivariate polynomials.

Everything here is exact: scalars are ``gmpy2.mpq`` values and every
operation on :class:`BiPoly` and :class:`RInterval` is carried out in
rational arithmetic.  The polynomial variables are called ``x`` and
``alpha``; coefficient ``c[m][n]`` multiplies ``x**m * alpha**n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

ExactRational = mpq

ZERO = mpq(0)
ONE = mpq(1)


class WindowError(ValueError):
    """Raised when an affine window has zero (or negative) width."""


def Q(value) -> mpq:
    """Convert ``value`` to an exact rational.

    Strings are parsed exactly, so ``Q("0.0625") == mpq(1, 16)``.  Floats
    are converted via their exact binary value.
    """
    if isinstance(value, type(ONE)):
        return value
    if isinstance(value, str):
        return mpq(Fraction(value))
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


# ---------------------------------------------------------------------------
# intervals with rational endpoints


@dataclass(frozen=True)
class RInterval:
    lo: mpq
    hi: mpq

    def __post_init__(self):
        object.__setattr__(self, "lo", Q(self.lo))
        object.__setattr__(self, "hi", Q(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v) -> "RInterval":
        v = Q(v)
        return cls(v, v)

    @classmethod
    def hull(cls, values: Iterable) -> "RInterval":
        vals = [Q(v) for v in values]
        return cls(min(vals), max(vals))

    @property
    def width(self) -> mpq:
        return self.hi - self.lo

    @property
    def mid(self) -> mpq:
        return (self.lo + self.hi) / 2

    @property
    def mag(self) -> mpq:
        return max(abs(self.lo), abs(self.hi))

    def __contains__(self, v) -> bool:
        return self.lo <= Q(v) <= self.hi

    def contains_interval(self, other: "RInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def _coerce(self, other) -> "RInterval":
        return other if isinstance(other, RInterval) else RInterval.point(other)

    def __add__(self, other):
        o = self._coerce(other)
        return RInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RInterval(min(p), max(p))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * RInterval(1 / o.hi, 1 / o.lo)

    def __pow__(self, k: int):
        if k == 0:
            return RInterval.point(1)
        if k % 2 == 1 or self.lo >= 0:
            return RInterval(min(self.lo**k, self.hi**k), max(self.lo**k, self.hi**k))
        if self.hi <= 0:
            return RInterval(self.hi**k, self.lo**k)
        return RInterval(0, max(self.lo**k, self.hi**k))

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"RInterval({float(self.lo):.10g}, {float(self.hi):.10g})"


# ---------------------------------------------------------------------------
# univariate helpers on coefficient lists (index = degree)


def _trim(c: list) -> list:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def poly1_eval(c: Sequence, y):
    acc = ZERO if not isinstance(y, RInterval) else RInterval.point(0)
    for coef in reversed(c):
        acc = acc * y + coef
    return acc


def poly1_affine(c: Sequence[mpq], shift: mpq, scale: mpq) -> list[mpq]:
    """Coefficients of ``p(shift + scale*y)`` (Taylor shift, then scale)."""
    out = [Q(v) for v in c]
    d = len(out) - 1
    if shift != 0:
        for i in range(d):
            for k in range(d - 1, i - 1, -1):
                out[k] += shift * out[k + 1]
    if scale != 1:
        f = ONE
        for k in range(d + 1):
            out[k] *= f
            f *= scale
    return out


def poly1_deriv(c: Sequence[mpq]) -> list[mpq]:
    if len(c) <= 1:
        return [ZERO]
    return [k * c[k] for k in range(1, len(c))]


def poly1_antideriv(c: Sequence[mpq]) -> list[mpq]:
    return [ZERO] + [c[k] / (k + 1) for k in range(len(c))]


# ---------------------------------------------------------------------------
# bivariate polynomials


class BiPoly:
    """Dense bivariate polynomial in ``(x, alpha)`` with rational coefficients.

    Instances are immutable; ``coeffs[m][n]`` is the coefficient of
    ``x**m alpha**n``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[Iterable]):
        rows = [[Q(v) for v in row] for row in coeffs]
        if not rows:
            rows = [[ZERO]]
        width = max(len(r) for r in rows) or 1
        rows = [r + [ZERO] * (width - len(r)) for r in rows]
        # trim trailing zero rows / columns
        while len(rows) > 1 and all(v == 0 for v in rows[-1]):
            rows.pop()
        while width > 1 and all(r[width - 1] == 0 for r in rows):
            width -= 1
            rows = [r[:width] for r in rows]
        self._c = tuple(tuple(r) for r in rows)

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, v) -> "BiPoly":
        return cls([[v]])

    @classmethod
    def x(cls) -> "BiPoly":
        return cls([[0], [1]])

    @classmethod
    def alpha(cls) -> "BiPoly":
        return cls([[0, 1]])

    @classmethod
    def from_dict(cls, terms: dict) -> "BiPoly":
        if not terms:
            return cls.const(0)
        dm = max(m for m, _ in terms) + 1
        dn = max(n for _, n in terms) + 1
        rows = [[ZERO] * dn for _ in range(dm)]
        for (m, n), v in terms.items():
            rows[m][n] += Q(v)
        return cls(rows)

    # -- basic properties ---------------------------------------------------
    @property
    def coeffs(self) -> tuple[tuple[mpq, ...], ...]:
        return self._c

    @property
    def deg_x(self) -> int:
        return len(self._c) - 1

    @property
    def deg_alpha(self) -> int:
        return len(self._c[0]) - 1

    def is_zero(self) -> bool:
        return all(v == 0 for row in self._c for v in row)

    def coeff(self, m: int, n: int) -> mpq:
        if m < len(self._c) and n < len(self._c[0]):
            return self._c[m][n]
        return ZERO

    def terms(self):
        for m, row in enumerate(self._c):
            for n, v in enumerate(row):
                if v != 0:
                    yield (m, n), v

    def __eq__(self, other) -> bool:
        if isinstance(other, BiPoly):
            return self._c == other._c
        return self._c == BiPoly.const(other)._c

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        return f"BiPoly(deg_x={self.deg_x}, deg_alpha={self.deg_alpha})"

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "BiPoly":
        return other if isinstance(other, BiPoly) else BiPoly.const(other)

    def __add__(self, other):
        o = self._coerce(other)
        dm = max(len(self._c), len(o._c))
        dn = max(len(self._c[0]), len(o._c[0]))
        return BiPoly([[self.coeff(m, n) + o.coeff(m, n) for n in range(dn)] for m in range(dm)])

    __radd__ = __add__

    def __neg__(self):
        return BiPoly([[-v for v in row] for row in self._c])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            s = Q(other)
            return BiPoly([[v * s for v in row] for row in self._c])
        a, b = self._c, other._c
        out = [[ZERO] * (len(a[0]) + len(b[0]) - 1) for _ in range(len(a) + len(b) - 1)]
        for i, ra in enumerate(a):
            for j, rb in enumerate(b):
                row = out[i + j]
                for k, va in enumerate(ra):
                    if va == 0:
                        continue
                    for l, vb in enumerate(rb):
                        if vb != 0:
                            row[k + l] += va * vb
        return BiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = BiPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------------
    def diff_x(self, order: int = 1) -> "BiPoly":
        p = self
        for _ in range(order):
            if p.deg_x == 0:
                return BiPoly.const(0)
            p = BiPoly([[m * v for v in p._c[m]] for m in range(1, len(p._c))])
        return p

    def diff_alpha(self, order: int = 1) -> "BiPoly":
        p = self
        for _ in range(order):
            p = BiPoly([poly1_deriv(row) for row in p._c])
        return p

    def antidiff_x(self) -> "BiPoly":
        """Antiderivative in ``x`` vanishing at ``x = 0``."""
        return BiPoly([[ZERO] * len(self._c[0])] + [[v / (m + 1) for v in row] for m, row in enumerate(self._c)])

    def integrate_x(self, lo, hi) -> "BiPoly":
        """Definite integral over ``x`` in ``[lo, hi]``: a polynomial in alpha."""
        F = self.antidiff_x()
        return F.at_x(hi) - F.at_x(lo)

    # -- evaluation / substitution -----------------------------------------
    def column(self, n: int) -> list[mpq]:
        return [row[n] for row in self._c]

    def __call__(self, x, alpha):
        """Exact evaluation (also accepts :class:`RInterval` arguments)."""
        x, alpha = (v if isinstance(v, RInterval) else Q(v) for v in (x, alpha))
        cols = [poly1_eval(row, alpha) for row in self._c]
        return poly1_eval(cols, x)

    def at_x(self, x) -> "BiPoly":
        """Substitute a rational ``x``; result depends on alpha only."""
        x = Q(x)
        return BiPoly([[poly1_eval(self.column(n), x) for n in range(len(self._c[0]))]])

    def at_alpha(self, alpha) -> "BiPoly":
        """Substitute a rational ``alpha``; result depends on x only."""
        alpha = Q(alpha)
        return BiPoly([[poly1_eval(row, alpha)] for row in self._c])

    def univariate_x(self) -> list[mpq]:
        if self.deg_alpha != 0:
            raise ValueError("polynomial depends on alpha")
        return [row[0] for row in self._c]

    def univariate_alpha(self) -> list[mpq]:
        if self.deg_x != 0:
            raise ValueError("polynomial depends on x")
        return list(self._c[0])

    def substitute_x(self, shift, scale) -> "BiPoly":
        """``p(shift + scale*x, alpha)``."""
        shift, scale = Q(shift), Q(scale)
        cols = [poly1_affine(self.column(n), shift, scale) for n in range(len(self._c[0]))]
        return BiPoly([[cols[n][m] for n in range(len(cols))] for m in range(len(self._c))])

    def substitute_alpha(self, shift, scale) -> "BiPoly":
        """``p(x, shift + scale*alpha)``."""
        shift, scale = Q(shift), Q(scale)
        return BiPoly([poly1_affine(row, shift, scale) for row in self._c])

    def divide_x_power(self, k: int) -> "BiPoly":
        """Exact quotient by ``x**k``; raises if the division is not exact."""
        if any(v != 0 for row in self._c[:k] for v in row):
            raise ValueError(f"polynomial is not divisible by x**{k}")
        if k >= len(self._c):
            return BiPoly.const(0)
        return BiPoly(self._c[k:])

    def x_valuation(self) -> int:
        """Lowest power of ``x`` carrying a nonzero coefficient."""
        for m, row in enumerate(self._c):
            if any(v != 0 for v in row):
                return m
        return 0

    def l1_norm(self) -> mpq:
        return sum((abs(v) for row in self._c for v in row), ZERO)


# ---------------------------------------------------------------------------
# operations used by the range-bounding engine


def _window(win) -> tuple[mpq, mpq]:
    lo, hi = (Q(v) for v in win)
    if not hi > lo:
        raise WindowError(f"degenerate window [{lo}, {hi}]")
    return (lo + hi) / 2, (hi - lo) / 2


def affine_rescale(p: BiPoly, x_window, alpha_window) -> BiPoly:
    """Re-express ``p`` in scaled variables ranging over ``[-1, 1]``.

    ``x = mid_x + half_x * x~`` and likewise for alpha.
    """
    mx, hx = _window(x_window)
    ma, ha = _window(alpha_window)
    return p.substitute_x(mx, hx).substitute_alpha(ma, ha)


def inverse_rescale(p: BiPoly, x_window, alpha_window) -> BiPoly:
    """Undo :func:`affine_rescale`."""
    mx, hx = _window(x_window)
    ma, ha = _window(alpha_window)
    return p.substitute_x(-mx / hx, 1 / hx).substitute_alpha(-ma / ha, 1 / ha)


def _refine_root(c: Sequence[mpq], lo: mpq, hi: mpq, width: mpq) -> RInterval:
    """Bisect a sign-changing bracket of the univariate polynomial ``c``."""
    flo = poly1_eval(c, lo)
    if flo == 0:
        return RInterval.point(lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = poly1_eval(c, mid)
        if fm == 0:
            return RInterval.point(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return RInterval(lo, hi)


def _critical_enclosures(c: Sequence[mpq], width: mpq) -> list[RInterval]:
    """Enclosures of the real zeros of the derivative of a cubic on (-1, 1)."""
    c = list(c) + [ZERO] * (4 - len(c))
    d = [c[1], 2 * c[2], 3 * c[3]]
    if d[2] == 0:
        if d[1] == 0:
            return []
        r = -d[0] / d[1]
        return [RInterval.point(r)] if -1 < r < 1 else []
    vertex = -d[1] / (2 * d[2])
    pieces = [(mpq(-1), min(max(vertex, mpq(-1)), ONE)), (min(max(vertex, mpq(-1)), ONE), ONE)]
    out = []
    for lo, hi in pieces:
        if hi <= lo:
            continue
        flo, fhi = poly1_eval(d, lo), poly1_eval(d, hi)
        if flo == 0 and -1 < lo < 1:
            out.append(RInterval.point(lo))
        elif fhi == 0 and -1 < hi < 1:
            out.append(RInterval.point(hi))
        elif (flo > 0) != (fhi > 0):
            out.append(_refine_root(d, lo, hi, width))
    return out


CUBIC_ROOT_WIDTH = mpq(1, 10**12)


def cubic_extrema(c: Sequence, root_width: mpq = CUBIC_ROOT_WIDTH) -> tuple[RInterval, RInterval]:
    """Certified enclosures of ``min`` and ``max`` of a cubic on ``[-1, 1]``.

    ``c`` holds ``(c0, c1, c2, c3)``; shorter sequences are zero padded.
    Candidates are the endpoints and the critical points of the exact
    derivative, the latter enclosed by exact-sign bisection.
    """
    c = [Q(v) for v in c] + [ZERO] * (4 - len(c))
    cands = [RInterval.point(poly1_eval(c, mpq(-1))), RInterval.point(poly1_eval(c, ONE))]
    for root in _critical_enclosures(c, root_width):
        if root.width == 0:
            cands.append(RInterval.point(poly1_eval(c, root.lo)))
        else:
            cands.append(poly1_eval(c, root))
    lo = RInterval(min(v.lo for v in cands), min(v.hi for v in cands))
    hi = RInterval(max(v.lo for v in cands), max(v.hi for v in cands))
    return lo, hi


def l1_tail(p: BiPoly, excluded: Iterable[tuple[int, int]] = ()) -> mpq:
    """Sum of ``|c[m][n]|`` over all index pairs not in ``excluded``."""
    skip = set(excluded)
    return sum((abs(v) for (m, n), v in p.terms() if (m, n) not in skip), ZERO)


def chebyshev_of_monomials(degree: int) -> list[list[mpq]]:
    """Table ``T[m][i]`` with ``y**m = sum_i T[m][i] * T_i(y)``.

    Built from ``y*T_0 = T_1`` and ``y*T_i = (T_{i-1} + T_{i+1})/2``.
    """
    table = [[ONE]]
    half = mpq(1, 2)
    for m in range(1, degree + 1):
        prev = table[-1]
        row = [ZERO] * (m + 1)
        for i, v in enumerate(prev):
            if v == 0:
                continue
            if i == 0:
                row[1] += v
            else:
                row[i - 1] += half * v
                row[i + 1] += half * v
        table.append(row)
    return table


def cheb_coefficients(p: BiPoly) -> list[list[mpq]]:
    """Chebyshev coefficients ``r[i][j]`` of a polynomial already on ``[-1,1]^2``."""
    tx = chebyshev_of_monomials(p.deg_x)
    ta = chebyshev_of_monomials(p.deg_alpha)
    # transform alpha first (row-wise), then x (column-wise)
    rows = []
    for row in p.coeffs:
        out = [ZERO] * (p.deg_alpha + 1)
        for n, v in enumerate(row):
            if v != 0:
                for j, w in enumerate(ta[n]):
                    out[j] += v * w
        rows.append(out)
    r = [[ZERO] * (p.deg_alpha + 1) for _ in range(p.deg_x + 1)]
    for m, row in enumerate(rows):
        for i, w in enumerate(tx[m]):
            if w == 0:
                continue
            ri = r[i]
            for j, v in enumerate(row):
                if v != 0:
                    ri[j] += w * v
    return r


def cheb_expand(p: BiPoly, x_window, alpha_window) -> list[list[mpq]]:
    """Exact ``r[i][j]`` with ``p = sum r[i][j] T_j(alpha~) T_i(x~)`` on the window."""
    return cheb_coefficients(affine_rescale(p, x_window, alpha_window))


def chebyshev_T(k: int, y):
    """Evaluate ``T_k(y)`` by the three-term recurrence (exact for rationals)."""
    if k == 0:
        return ONE if not isinstance(y, RInterval) else RInterval.point(1)
    t0, t1 = (ONE if not isinstance(y, RInterval) else RInterval.point(1)), y
    for _ in range(k - 1):
        t0, t1 = t1, 2 * y * t1 - t0
    return t1


def cheb_eval(r: Sequence[Sequence[mpq]], xs, al) -> mpq:
    """Evaluate a Chebyshev table at scaled coordinates."""
    tx = [chebyshev_T(i, xs) for i in range(len(r))]
    ta = [chebyshev_T(j, al) for j in range(len(r[0]))]
    return sum((r[i][j] * tx[i] * ta[j] for i in range(len(r)) for j in range(len(r[0])) if r[i][j] != 0), ZERO)


# ---------------------------------------------------------------------------
# directed decimal rounding

def _floor_log10(q: mpq) -> int:
    q = abs(q)
    if q == 0:
        raise ValueError("zero has no decimal exponent")
    import math

    e = math.floor(math.log10(float(q))) if 1e-300 < float(q) < 1e300 else 0
    while mpq(10) ** e > q:
        e -= 1
    while mpq(10) ** (e + 1) <= q:
        e += 1
    return e


def _round_scaled(v: mpq, rounding: str) -> int:
    fl = int(v.numerator // v.denominator)
    if rounding == "down":
        return fl
    if rounding == "up":
        return fl if fl == v else fl + 1
    if rounding == "nearest":
        frac = v - fl
        if frac > mpq(1, 2) or (frac == mpq(1, 2) and fl % 2):
            return fl + 1
        return fl
    raise ValueError(f"unknown rounding mode {rounding!r}")


def round_dec(q, decimals: int, rounding: str = "nearest") -> mpq:
    """Round to ``decimals`` places; ``up``/``down`` are toward +/- infinity."""
    q = Q(q)
    scale = mpq(10) ** decimals
    return mpq(_round_scaled(q * scale, rounding)) / scale


def round_sig(q, digits: int, rounding: str = "nearest") -> mpq:
    """Round to ``digits`` significant digits with a directed mode."""
    q = Q(q)
    if q == 0:
        return q
    return round_dec(q, digits - 1 - _floor_log10(q), rounding)
