"""The inner polynomial quasi-solution, its far-field continuation and
certified point evaluation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from gmpy2 import mpq

from . import data
from . import interval as iv
from .exact import BiPoly, Q, poly1_eval
from .interval import Interval
from .special import DEFAULT_ACC, CertValue, DomainError, ExpSeries, eval_series, q0_series

QUANTITIES = ("F", "F'", "F''")


@dataclass(frozen=True)
class InnerQuasi:
    F0: BiPoly
    R: BiPoly
    G1: BiPoly
    G2: BiPoly
    G3: BiPoly

    @property
    def F0p(self) -> BiPoly:
        return self.F0.diff_x()

    @property
    def F0pp(self) -> BiPoly:
        return self.F0.diff_x(2)

    def derivative(self, order: int) -> BiPoly:
        return self.F0.diff_x(order) if order else self.F0


def compose_inner(p_matrix=data.P_MATRIX) -> InnerQuasi:
    """Expand alpha + x^2/2 + x^3 P(2x/5; 25 alpha/3 + 1/2) exactly."""
    rows = [
        [mpq(v) / ((i + 1) * (i + 2) * (i + 3)) for v in row]
        for i, row in enumerate(p_matrix)
    ]
    P = BiPoly(rows).substitute_x(0, mpq(2, 5)).substitute_alpha(mpq(1, 2), mpq(25, 3))
    x, a = BiPoly.x(), BiPoly.alpha()
    F0 = a + x * x * mpq(1, 2) + x ** 3 * P
    F2 = F0.diff_x(2)
    R = F0.diff_x(3) + F0 * F2
    G2 = F2 - F0 * 2
    return InnerQuasi(F0=F0, R=R, G1=F2 * 2 - F0 * 2, G2=G2, G3=G2 + 1)


@lru_cache(maxsize=1)
def build_inner() -> InnerQuasi:
    return compose_inner()


def _check_alpha(alpha) -> mpq:
    a = Q(alpha)
    if not data.ALPHA_MIN <= a <= data.ALPHA_MAX:
        raise DomainError(
            f"alpha={float(a):g} outside the supported interval [-3/50, 3/50]"
        )
    return a


def nominal_params(alpha) -> tuple[mpq, mpq, mpq]:
    """(a0, b0, c0) at alpha, exactly."""
    a = _check_alpha(alpha)
    return tuple(poly1_eval(list(cs), a) for cs in (data.A0_COEFFS, data.B0_COEFFS, data.C0_COEFFS))


def t_of_x(x, a, b):
    """t = (a/2)(x + b/a)^2, written as (a x + b)^2 / (2a)."""
    if isinstance(a, Interval):
        if a.lo <= 0:
            raise DomainError("a must be positive")
    elif a <= 0:
        raise DomainError("a must be positive")
    u = a * x + b
    return u * u / (2 * a)


@dataclass(frozen=True)
class FarParams:
    """Far-field parameters with an optional certified radius.

    ``radius`` bounds the distance to the true matched parameters in the
    weighted norm sqrt(da^2 + db^2/4 + dc^2/4), so the enclosing box is
    a +- r, b +- 2r, c +- 2r.
    """

    a: float
    b: float
    c: float
    alpha: float | None = None
    radius: float = 0.0
    certified: bool = False

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("a must be positive")
        if abs(self.c) > float(data.C_CEILING):
            raise DomainError("|c| must not exceed 1/4")
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    def box(self) -> tuple[Interval, Interval, Interval]:
        r = self.radius
        return (
            Interval(self.a) + Interval(-r, r),
            Interval(self.b) + Interval(-2 * r, 2 * r),
            Interval(self.c) + Interval(-2 * r, 2 * r),
        )

    def trust_distance(self) -> float:
        """Upper bound of the weighted distance to the nominal parameters plus the radius."""
        if self.alpha is None:
            raise ValueError("alpha is required for the trust region")
        a0, b0, c0 = nominal_params(self.alpha)
        d2 = (Q(self.a) - a0) ** 2 + (Q(self.b) - b0) ** 2 / 4 + (Q(self.c) - c0) ** 2 / 4
        return iv.sqrt(Interval(d2)).hi + self.radius

    def in_trust_region(self) -> bool:
        return self.trust_distance() <= float(data.RHO0)

    def t_match(self) -> Interval:
        a, b, _ = self.box()
        return t_of_x(Interval(data.X_MATCH), a, b)


@dataclass(frozen=True)
class CertifiedValue:
    value: float
    radius: float
    quantity: str

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if self.quantity not in QUANTITIES and self.quantity != "wall_stress":
            raise ValueError(f"unknown quantity {self.quantity!r}")

    @property
    def lo(self) -> float:
        return self.value - self.radius

    @property
    def hi(self) -> float:
        return self.value + self.radius

    def contains(self, v: float) -> bool:
        # guard against the rounding of value +- radius itself
        return abs(v - self.value) <= self.radius * (1 + 1e-12) + 4 * math.ulp(abs(self.value) + self.radius)

    def overlaps(self, other: "CertifiedValue") -> bool:
        return abs(self.value - other.value) <= self.radius + other.radius


# ---------------------------------------------------------------------------
# far-field (outer) representation

@lru_cache(maxsize=None)
def outer_series(order: int) -> ExpSeries:
    """t-space kernels of the outer solution's x-derivatives.

    order 0: q0 / s (times sqrt(a/2)); order 1: q0' - q0/(2t) (times a);
    order 2: s q0'' - q0'/(2s) + q0/(2 s^3) (times sqrt(2) a^{3/2}).
    """
    q, q1, q2 = q0_series(0), q0_series(1), q0_series(2)
    if order == 0:
        return q.shift_s(-1)
    if order == 1:
        return q1 - (q * mpq(1, 2)).shift_s(-2)
    if order == 2:
        return q2.shift_s(1) - (q1 * mpq(1, 2)).shift_s(-1) + (q * mpq(1, 2)).shift_s(-3)
    raise ValueError("order must be 0, 1 or 2")


def outer_interval(x, a, b, c, order: int, acc: float = DEFAULT_ACC) -> Interval:
    """Interval value of the outer quasi-solution; every argument may be an interval."""
    X, A, B, C = (Interval(v) for v in (x, a, b, c))
    t = t_of_x(X, A, B)
    k = eval_series(outer_series(order), t, C, acc)
    if order == 0:
        return A * X + B + iv.sqrt(A / 2) * k
    if order == 1:
        return A + A * k
    return iv.sqrt(Interval(2.0)) * A * iv.sqrt(A) * k


def F0_outer(x, params: FarParams, order: int = 0, acc: float = DEFAULT_ACC) -> CertValue:
    """Outer quasi-solution at the centre of ``params``."""
    if Q(x) < data.X_MATCH:
        raise DomainError("the outer branch is defined for x >= 5/2")
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    t = t_of_x(Interval(x), Interval(params.a), Interval(params.b))
    if t.lo < float(data.T_FLOOR):
        raise DomainError("t(x) falls below the far-field floor 1.96")
    val = outer_interval(x, params.a, params.b, params.c, order, acc)
    scale = max(1.0, abs(val.mid))
    return CertValue(val, max(acc * scale, val.width))


def outer_radius(quantity: str, t_lo: float, constants=None) -> float:
    """Far-field error radius C t^p e^{-3t}, decreasing in t so evaluated at t_lo."""
    consts = constants or data.OUTER_CONSTANTS
    T = Interval(t_lo)
    p = data.OUTER_T_POWERS[quantity]
    tp = iv.exp(Interval(p) * iv.log(T))
    return (Interval(consts[quantity]) * tp * iv.exp(-3 * T)).hi


# ---------------------------------------------------------------------------
# certified evaluation

def _inner_radii(x: mpq, radii: str):
    if radii == "theorem":
        return {k: float(Interval(v).hi) for k, v in data.INNER_RADII.items()}
    if radii == "subinterval":
        from .energy import chain_radii_at

        return chain_radii_at(x)
    raise ValueError(f"unknown radii mode {radii!r}")


def eval_with_envelope(x, alpha, matched: FarParams | None = None, radii: str = "theorem",
                       inner: InnerQuasi | None = None) -> dict[str, CertifiedValue]:
    """F, F' and F'' with certified error radii at (x, alpha)."""
    xq = Q(x)
    aq = _check_alpha(alpha)
    if xq < 0:
        raise DomainError("x must be nonnegative")
    out = {}
    if xq <= data.X_MATCH:
        inner = inner or build_inner()
        rads = _inner_radii(xq, radii)
        for order, name in enumerate(QUANTITIES):
            val = Interval(inner.derivative(order)(xq, aq))
            out[name] = CertifiedValue(val.mid, (Interval(rads[name]) + val.rad).hi, name)
        return out
    if matched is None or not matched.certified:
        raise DomainError("the outer branch needs certified matched parameters")
    if matched.alpha is not None and abs(float(matched.alpha) - float(aq)) > 1e-12:
        raise DomainError("matched parameters belong to a different alpha")
    a, b, c = matched.box()
    t = t_of_x(Interval(xq), a, b)
    for order, name in enumerate(QUANTITIES):
        val = outer_interval(xq, a, b, c, order)
        rad = Interval(outer_radius(name, t.lo)) + val.rad
        out[name] = CertifiedValue(val.mid, rad.hi, name)
    return out


def wall_stress(alpha, matched: FarParams | None = None) -> CertifiedValue:
    """f''(0) = a^{-3/2} of the physical profile."""
    if matched is None:
        from .matching import solve_match

        matched, _ = solve_match(alpha)
    a = Interval(matched.a) + Interval(-matched.radius, matched.radius)
    w = 1 / (a * iv.sqrt(a))
    return CertifiedValue(w.mid, w.rad, "wall_stress")
