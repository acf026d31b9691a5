"""Certified erfc, I0, J0 and the far-field kernel functions.

Far-field expressions are kept symbolically as sums ``sum_k c^k e^{-kt} f_k``
where each ``f_k`` is a Laurent polynomial in ``s = sqrt(t)`` and polynomial
in ``I = I0(t)`` and ``J = J0(t)``.  Differentiation in ``t`` uses the closed
derivative identities of I0 and J0, so every derived quantity (q0', B, V, the
residual) is exact before it is evaluated in interval arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from gmpy2 import mpq

from . import interval as iv
from .interval import Interval

DEFAULT_ACC = 1e-12
T_GUARD = 1.0
T_FLOOR = 1.96
C_CEILING = 0.25


class DomainError(ValueError):
    """Argument outside the supported domain of a certified routine."""


@dataclass(frozen=True)
class CertValue:
    enclosure: Interval
    requested_accuracy: float

    @property
    def lo(self) -> float:
        return self.enclosure.lo

    @property
    def hi(self) -> float:
        return self.enclosure.hi

    @property
    def mid(self) -> float:
        return self.enclosure.mid

    @property
    def width(self) -> float:
        return self.enclosure.width

    def __contains__(self, v) -> bool:
        return v in self.enclosure

    def __float__(self) -> float:
        return self.mid


def _check_acc(acc: float) -> None:
    if not acc > 0:
        raise ValueError("accuracy must be positive")


def _cert(x: Interval, acc: float) -> CertValue:
    if x.hi - x.lo > 2 * acc:
        raise ArithmeticError(f"enclosure width {x.hi - x.lo:.3g} exceeds 2*{acc:.3g}")
    return CertValue(x, acc)


# ---------------------------------------------------------------------------
# erfc and the Stieltjes continued fraction
# ---------------------------------------------------------------------------

def _cf_bracket(z: Interval, n: int) -> Interval:
    """Enclose g(z) = 1/(1 + z/(1 + 2z/(1 + 3z/...))) for z > 0.

    Every tail t_k = 1 + k z / t_{k+1} satisfies 1 <= t_k <= 1 + k z, which
    brackets the truncated fraction.
    """
    tail = Interval(1.0).hull(1 + n * z)
    for k in range(n - 1, 0, -1):
        tail = 1 + (k * z) / tail
    return 1 / tail


def _cf_value(z: Interval, acc: float) -> Interval:
    n = 16
    while True:
        g = _cf_bracket(z, n)
        if g.hi - g.lo <= acc or n > 1 << 14:
            return g
        n *= 2


def erfc_cert(x, acc: float = DEFAULT_ACC) -> CertValue:
    """Certified erfc(x) for x >= 0."""
    _check_acc(acc)
    X = Interval(x)
    if X.lo < 0:
        raise DomainError("erfc_cert requires x >= 0")
    sqrt_pi = iv.sqrt(iv.PI)
    if X.hi <= 1.0:
        # erf(x) = 2/sqrt(pi) * sum (-1)^n x^{2n+1} / (n! (2n+1)); terms shrink
        # monotonically for x <= 1 so the tail lies between 0 and the next term.
        x2 = X * X
        term = X
        total = Interval(0.0)
        n = 0
        while True:
            piece = term / (2 * n + 1)
            if piece.mag < acc / 8:
                break
            total = total + piece if n % 2 == 0 else total - piece
            n += 1
            term = term * x2 / n
        tail = Interval(0.0).hull(piece if n % 2 == 0 else -piece)
        erf = 2 * (total + tail) / sqrt_pi
        return _cert(1 - erf, acc)
    z = 1 / (2 * X * X)
    g = _cf_value(z, acc / 4)
    out = iv.exp(-(X * X)) / (sqrt_pi * X) * g
    return _cert(out, acc)


def I0_cert(t, acc: float = DEFAULT_ACC) -> CertValue:
    """I0(t) = 1 - sqrt(pi t) e^t erfc(sqrt t), for t >= 1."""
    _check_acc(acc)
    T = Interval(t)
    if T.lo < T_GUARD:
        raise DomainError(f"I0_cert requires t >= {T_GUARD}")
    return _cert(1 - _cf_value(1 / (2 * T), acc / 2), acc)


def J0_cert(t, acc: float = DEFAULT_ACC) -> CertValue:
    """J0(t) = I0(2t)."""
    T = Interval(t)
    if T.lo < T_GUARD:
        raise DomainError(f"J0_cert requires t >= {T_GUARD}")
    return I0_cert(2 * T, acc)


def I0_range(t: Interval, acc: float = DEFAULT_ACC) -> Interval:
    """Range of I0 over an interval of t; I0 is decreasing."""
    t = Interval(t)
    if t.lo == t.hi:
        return I0_cert(t.lo, acc).enclosure
    return Interval(I0_cert(t.hi, acc).lo, I0_cert(t.lo, acc).hi)


# ---------------------------------------------------------------------------
# Exact symbolic layer
# ---------------------------------------------------------------------------

Mono = tuple[int, int, int]  # powers of (s, I, J)


class FarPoly:
    """Laurent polynomial in s, polynomial in I and J, rational coefficients."""

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping[Mono, object] | None = None):
        clean = {}
        for k, v in (terms or {}).items():
            v = mpq(v)
            if v != 0:
                clean[tuple(k)] = v
        self._t = clean

    @classmethod
    def monomial(cls, ps: int = 0, pi: int = 0, pj: int = 0, coeff=1) -> "FarPoly":
        return cls({(ps, pi, pj): coeff})

    @property
    def terms(self) -> dict[Mono, mpq]:
        return dict(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __eq__(self, other) -> bool:
        return isinstance(other, FarPoly) and self._t == other._t

    def __hash__(self):
        return hash(tuple(sorted(self._t.items())))

    def __repr__(self):
        return f"FarPoly({len(self._t)} terms)"

    def __add__(self, other: "FarPoly") -> "FarPoly":
        out = dict(self._t)
        for k, v in other._t.items():
            out[k] = out.get(k, 0) + v
        return FarPoly(out)

    def __neg__(self) -> "FarPoly":
        return FarPoly({k: -v for k, v in self._t.items()})

    def __sub__(self, other: "FarPoly") -> "FarPoly":
        return self + (-other)

    def __mul__(self, other) -> "FarPoly":
        if not isinstance(other, FarPoly):
            return FarPoly({k: v * mpq(other) for k, v in self._t.items()})
        out: dict = {}
        for (a1, b1, c1), v1 in self._t.items():
            for (a2, b2, c2), v2 in other._t.items():
                key = (a1 + a2, b1 + b2, c1 + c2)
                out[key] = out.get(key, 0) + v1 * v2
        return FarPoly(out)

    __rmul__ = __mul__

    def shift_s(self, p: int) -> "FarPoly":
        """Multiply by s**p."""
        return FarPoly({(a + p, b, c): v for (a, b, c), v in self._t.items()})

    def dt(self) -> "FarPoly":
        """d/dt with s' = 1/(2s), I' = I + (I-1)/(2s^2), J' = 2J + (J-1)/(2s^2)."""
        out: dict = {}

        def add(key, val):
            out[key] = out.get(key, 0) + val

        half = mpq(1, 2)
        for (p, i, j), v in self._t.items():
            if p:
                add((p - 2, i, j), v * p * half)
            if i:
                add((p, i, j), v * i)
                add((p - 2, i, j), v * i * half)
                add((p - 2, i - 1, j), -v * i * half)
            if j:
                add((p, i, j), 2 * v * j)
                add((p - 2, i, j), v * j * half)
                add((p - 2, i, j - 1), -v * j * half)
        return FarPoly(out)

    def __call__(self, s, I, J):
        """Evaluate; works for Interval, float, mpq or mpmath arguments."""
        total = 0
        cache_s: dict[int, object] = {}
        for (p, i, j), v in sorted(self._t.items()):
            if p not in cache_s:
                cache_s[p] = s ** p
            total = total + _coef(v, s) * cache_s[p] * I ** i * J ** j
        return total


def _coef(v: mpq, like):
    if isinstance(like, Interval):
        return Interval(v)
    if isinstance(like, float):
        return float(v)
    try:
        import mpmath

        if isinstance(like, mpmath.mpf):
            return mpmath.mpf(int(v.numerator)) / int(v.denominator)
    except ImportError:  # pragma: no cover
        pass
    return v


class ExpSeries:
    """e^{-damp t} sum_k c^k e^{-k t} f_k(s, I, J).

    ``damp`` records an extra exponential factor that cannot be folded into
    the c-indexed weights, as produced by differentiating in c.
    """

    __slots__ = ("parts", "damp")

    def __init__(self, parts: Mapping[int, FarPoly], damp: int = 0):
        self.parts = {k: f for k, f in parts.items() if not f.is_zero()}
        self.damp = damp

    def _same(self, other: "ExpSeries") -> None:
        if self.damp != other.damp and self.parts and other.parts:
            raise ValueError("cannot combine series with different damping")

    def __add__(self, other: "ExpSeries") -> "ExpSeries":
        self._same(other)
        out = dict(self.parts)
        for k, f in other.parts.items():
            out[k] = out[k] + f if k in out else f
        return ExpSeries(out, self.damp if self.parts else other.damp)

    def __neg__(self):
        return ExpSeries({k: -f for k, f in self.parts.items()}, self.damp)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "ExpSeries":
        if isinstance(other, ExpSeries):
            out: dict = {}
            for k1, f1 in self.parts.items():
                for k2, f2 in other.parts.items():
                    k = k1 + k2
                    out[k] = out[k] + f1 * f2 if k in out else f1 * f2
            return ExpSeries(out, self.damp + other.damp)
        return ExpSeries({k: f * other for k, f in self.parts.items()}, self.damp)

    __rmul__ = __mul__

    def shift_s(self, p: int) -> "ExpSeries":
        return ExpSeries({k: f.shift_s(p) for k, f in self.parts.items()}, self.damp)

    def reindex(self, dk: int) -> "ExpSeries":
        """Divide by (c e^{-t})**dk, only as bookkeeping."""
        return ExpSeries({k - dk: f for k, f in self.parts.items()}, self.damp)

    def dt(self) -> "ExpSeries":
        m = self.damp
        return ExpSeries({k: f.dt() - f * (k + m) for k, f in self.parts.items()}, m)

    def dc(self) -> "ExpSeries":
        """Partial derivative in c: c^k e^{-kt} -> k c^{k-1} e^{-(k-1)t} e^{-t}."""
        return ExpSeries({k - 1: f * k for k, f in self.parts.items() if k}, self.damp + 1)

    def is_zero(self) -> bool:
        return not self.parts

    def evaluate(self, ctx: "FarContext"):
        total = Interval(0.0)
        for k, f in sorted(self.parts.items()):
            total = total + ctx.weight(k) * f(ctx.s, ctx.I, ctx.J)
        if self.damp:
            total = total * iv.exp(-self.damp * ctx.t)
        return total


@lru_cache(maxsize=None)
def q0_series(order: int = 0) -> ExpSeries:
    """q0 and its t-derivatives."""
    if order == 0:
        f1 = FarPoly.monomial(1, 1, 0, 2)
        f2 = FarPoly({(0, 1, 0): -1, (0, 2, 0): -1, (0, 0, 1): 2})
        return ExpSeries({1: f1, 2: f2})
    return q0_series(order - 1).dt()


@lru_cache(maxsize=None)
def B_series() -> ExpSeries:
    q, q1, q2 = q0_series(0), q0_series(1), q0_series(2)
    return (q2 * mpq(-1, 2)).shift_s(-1) + (q1 * mpq(1, 4)).shift_s(-3) - (q * mpq(1, 4)).shift_s(-5)


@lru_cache(maxsize=None)
def V_series() -> ExpSeries:
    """V = -(2/c) t e^t B, with the division by c e^{-t} done on indices."""
    return (B_series() * -2).shift_s(2).reindex(1)


@lru_cache(maxsize=None)
def residual_series() -> ExpSeries:
    q, q1, q2, q3 = (q0_series(n) for n in range(4))
    half = mpq(1, 2)
    quarter = mpq(1, 4)
    out = q3 + q2 + (q * q2 * half).shift_s(-2)
    out = out + (q1 * -half).shift_s(-2) + (q1 * mpq(3, 4)).shift_s(-4)
    out = out - (q * q1 * quarter).shift_s(-4)
    out = out + (q * half).shift_s(-4) - (q * mpq(3, 4)).shift_s(-6)
    out = out + (q * q * quarter).shift_s(-6)
    return out


@lru_cache(maxsize=None)
def h0_integrand_series() -> ExpSeries:
    """sqrt(t) e^t R, indexed so that part k carries c^k e^{-(k-1)t}."""
    return residual_series().shift_s(1)


# ---------------------------------------------------------------------------
# Numerical evaluation
# ---------------------------------------------------------------------------

@dataclass
class FarContext:
    t: Interval
    c: Interval
    s: Interval
    I: Interval
    J: Interval
    e: Interval  # e^{-t}
    _w: dict

    def weight(self, k: int) -> Interval:
        """c^k e^{-k t}; k may be zero or negative only for c-free series."""
        if k not in self._w:
            if k >= 0:
                self._w[k] = (self.c ** k) * iv.exp(-k * self.t) if k else Interval(1.0)
            else:
                raise ValueError("negative weights are not supported")
        return self._w[k]


def far_context(t, c, acc: float = DEFAULT_ACC) -> FarContext:
    T = Interval(t)
    C = Interval(c)
    if T.lo < T_GUARD:
        raise DomainError(f"far-field kernels need t >= {T_GUARD}")
    I = I0_range(T, acc / 8)
    J = I0_range(2 * T, acc / 8)
    return FarContext(T, C, iv.sqrt(T), I, J, iv.exp(-T), {})


def _guard(t, c) -> None:
    T, C = Interval(t), Interval(c)
    if T.lo < T_FLOOR:
        raise DomainError(f"t must be >= {T_FLOOR}")
    if C.mag > C_CEILING:
        raise DomainError(f"|c| must be <= {C_CEILING}")


def q0_eval(t, c, order: int = 0, acc: float = DEFAULT_ACC) -> CertValue:
    """q0(t; c) or its first/second/third t-derivative."""
    _check_acc(acc)
    _guard(t, c)
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0, 1, 2 or 3")
    return _cert(q0_series(order).evaluate(far_context(t, c, acc)), acc)


def B_eval(t, c, acc: float = DEFAULT_ACC) -> CertValue:
    _check_acc(acc)
    _guard(t, c)
    return _cert(B_series().evaluate(far_context(t, c, acc)), acc)


def V_eval(t, c, acc: float = DEFAULT_ACC) -> CertValue:
    """V(t; c) in a form analytic at c = 0."""
    _check_acc(acc)
    _guard(t, c)
    return _cert(V_series().evaluate(far_context(t, c, acc)), acc)


def far_residual(t, c, acc: float = DEFAULT_ACC) -> CertValue:
    _check_acc(acc)
    _guard(t, c)
    return _cert(residual_series().evaluate(far_context(t, c, acc)), acc)


def eval_series(series: ExpSeries, t, c, acc: float = DEFAULT_ACC) -> Interval:
    """Interval evaluation of any far-field series, t and c may be intervals."""
    return series.evaluate(far_context(t, c, acc))


def mp_eval_series(series: ExpSeries, t, c):
    """Plain high-precision evaluation with mpmath (no enclosure)."""
    import mpmath

    t = mpmath.mpf(t)
    c = mpmath.mpf(c)
    s = mpmath.sqrt(t)
    I = 1 - mpmath.sqrt(mpmath.pi * t) * mpmath.exp(t) * mpmath.erfc(s)
    J = 1 - mpmath.sqrt(2 * mpmath.pi * t) * mpmath.exp(2 * t) * mpmath.erfc(mpmath.sqrt(2 * t))
    total = mpmath.mpf(0)
    for k, f in series.parts.items():
        total += c ** k * mpmath.exp(-k * t) * f(s, I, J)
    return total * mpmath.exp(-series.damp * t)


def series_terms(series: ExpSeries) -> Iterable[tuple[int, FarPoly]]:
    return sorted(series.parts.items())
