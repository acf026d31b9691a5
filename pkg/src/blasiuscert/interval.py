"""Outward-rounded floating-point intervals.

Each arithmetic result is widened by one ulp in both directions, which
covers the round-to-nearest error of a single IEEE operation.  ``exp`` and
``log`` are widened by a few ulps since libm only promises faithful
rounding for them.
"""
from __future__ import annotations

import math
from fractions import Fraction

_INF = math.inf


def _dn(x: float, k: int = 1) -> float:
    for _ in range(k):
        x = math.nextafter(x, -_INF)
    return x


def _up(x: float, k: int = 1) -> float:
    for _ in range(k):
        x = math.nextafter(x, _INF)
    return x


def _enclose_exact(v) -> tuple[float, float]:
    """Tight float enclosure of an exact rational (int, Fraction, mpq)."""
    f = float(v)
    if math.isinf(f):
        return f, f
    try:
        exact = Fraction(f) == Fraction(int(v.numerator), int(v.denominator))
    except AttributeError:
        exact = Fraction(f) == Fraction(v)
    if exact:
        return f, f
    return _dn(f), _up(f)


class Interval:
    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            if isinstance(lo, Interval):
                lo, hi = lo.lo, lo.hi
            elif isinstance(lo, float):
                hi = lo
            else:
                lo, hi = _enclose_exact(lo)
        else:
            if not isinstance(lo, float):
                lo = _enclose_exact(lo)[0]
            if not isinstance(hi, float):
                hi = _enclose_exact(hi)[1]
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    # -- queries --------------------------------------------------------------
    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def rad(self) -> float:
        """Upper bound on the half-width about :attr:`mid`."""
        m = self.mid
        return _up(max(self.hi - m, m - self.lo))

    @property
    def width(self) -> float:
        return _up(self.hi - self.lo)

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        if self.lo <= 0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def __contains__(self, v) -> bool:
        if isinstance(v, Interval):
            return self.lo <= v.lo and v.hi <= self.hi
        return self.lo <= v <= self.hi

    def hull(self, other) -> "Interval":
        o = _as(other)
        return Interval(min(self.lo, o.lo), max(self.hi, o.hi))

    def intersect(self, other) -> "Interval":
        o = _as(other)
        return Interval(max(self.lo, o.lo), min(self.hi, o.hi))

    def split(self, n: int) -> list["Interval"]:
        pts = [self.lo + (self.hi - self.lo) * k / n for k in range(n + 1)]
        pts[0], pts[-1] = self.lo, self.hi
        return [Interval(pts[k], pts[k + 1]) for k in range(n)]

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = _as(other)
        return Interval(_dn(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = _as(other)
        return Interval(_dn(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        return _as(other) - self

    def __mul__(self, other):
        o = _as(other)
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_dn(min(p)), _up(max(p)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        p = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_dn(min(p)), _up(max(p)))

    def __rtruediv__(self, other):
        return _as(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k < 0:
            return 1 / (self ** (-k))
        out = Interval(1.0)
        base = self
        if k % 2 == 0 and self.lo < 0 < self.hi:
            m = max(-self.lo, self.hi)
            r = Interval(0.0, m) ** k
            return r
        for _ in range(k):
            out = out * base
        return out

    def __abs__(self):
        return Interval(self.mig, self.mag)

    def __float__(self):
        return self.mid

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


def _as(v) -> Interval:
    return v if isinstance(v, Interval) else Interval(v)


def point(v) -> Interval:
    return _as(v)


def sqrt(x) -> Interval:
    x = _as(x)
    if x.lo < 0:
        raise ValueError("sqrt of an interval reaching below zero")
    return Interval(max(0.0, _dn(math.sqrt(x.lo))), _up(math.sqrt(x.hi)))


def exp(x) -> Interval:
    x = _as(x)
    lo = _dn(math.exp(x.lo), 3) if x.lo > -745 else 0.0
    return Interval(max(lo, 0.0), _up(math.exp(x.hi), 3))


def log(x) -> Interval:
    x = _as(x)
    if x.lo <= 0:
        raise ValueError("log of an interval reaching zero")
    return Interval(_dn(math.log(x.lo), 3), _up(math.log(x.hi), 3))


PI = Interval(_dn(math.pi), _up(math.pi))
