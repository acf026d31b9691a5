"""Matching of the inner and outer representations at x = 5/2.

Unknowns are A = (a, b/2, c/2).  The map N is evaluated in interval
arithmetic: boundary data carry the inner error radii, the far-field
correction enters only through its weighted-norm ceiling, and parameters may
themselves be intervals so that the same code bounds N over a whole box.

Bounds on the correction h used here, with eta(t) = ||h|| e^{-2t} / t:

    |h(t)|             <= eta(t)
    |int_oo^t tau^{-1/2} e^{-tau} h|         <= ||h|| t^{-3/2} e^{-3t} / 3
    |int_oo^t s^{-1/2} int_oo^s (...) h|     <= ||h|| t^{-3/2} e^{-3t} / 9

For the c-dependence h is taken to scale at most cubically in c (its first
iterate is c^3 H3 + c^4 H4), which gives |h/c| <= eta / cbar,
|d_c h| <= 3 eta / cbar and |d_c (h/c)| <= 2 eta / cbar^2.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import data
from . import interval as iv
from .exact import Q
from .interval import Interval
from .quasi import FarParams, _check_alpha, build_inner, nominal_params, outer_series, t_of_x
from .special import DEFAULT_ACC, DomainError, V_series, eval_series, residual_series

T_WINDOW = (1.96, 2.05)
STEP_TOL = 1e-10
MAX_ITER = 200


class MatchingError(ArithmeticError):
    """A gate of the matching lemma failed or the iteration misbehaved."""


@dataclass(frozen=True)
class Boundary:
    F: Interval
    Fp: Interval
    Fpp: Interval


def boundary_data(alpha, radii=None) -> Boundary:
    """Inner quasi-solution at x = 5/2 widened by the inner error radii."""
    aq = _check_alpha(alpha)
    inner = build_inner()
    radii = data.INNER_RADII if radii is None else radii
    x = data.X_MATCH
    out = []
    for order, name in enumerate(("F", "F'", "F''")):
        v = Interval(inner.derivative(order)(x, aq))
        r = Interval(Q(radii[name])).hi if radii[name] else 0.0
        out.append(v + Interval(-r, r))
    return Boundary(*out)


@dataclass(frozen=True)
class MatchVector:
    """A = (a, b/2, c/2)."""

    a: float
    half_b: float
    half_c: float

    @classmethod
    def from_abc(cls, a, b, c) -> "MatchVector":
        return cls(float(a), float(b) / 2, float(c) / 2)

    @classmethod
    def nominal(cls, alpha) -> "MatchVector":
        a0, b0, c0 = nominal_params(alpha)
        return cls.from_abc(a0, b0, c0)

    @property
    def abc(self) -> tuple[float, float, float]:
        return self.a, 2 * self.half_b, 2 * self.half_c

    def as_tuple(self) -> tuple[float, float, float]:
        return self.a, self.half_b, self.half_c

    def distance(self, other: "MatchVector") -> float:
        return math.dist(self.as_tuple(), other.as_tuple())


@dataclass(frozen=True)
class HCeiling:
    """Weighted-norm data for the far-field correction."""

    norm: float = float(data.H_NORM_CEILING)
    c_bar: float = float(data.C_CEILING)

    def _unit(self, t: Interval, lo_exp: bool = True) -> Interval:
        # magnitudes are decreasing in t, so use t.lo
        return Interval(t.lo)

    def eta(self, t: Interval) -> Interval:
        T = self._unit(t)
        return Interval(0.0, (Interval(self.norm) * iv.exp(-2 * T) / T).hi)

    def _sym(self, m: Interval) -> Interval:
        return Interval(-m.hi, m.hi)

    def h(self, t) -> Interval:
        return self._sym(self.eta(t))

    def hint1(self, t) -> Interval:
        T = self._unit(t)
        return self._sym(Interval(self.norm) * iv.exp(-3 * T) / (3 * T * iv.sqrt(T)))

    def hint2(self, t) -> Interval:
        T = self._unit(t)
        return self._sym(Interval(self.norm) * iv.exp(-3 * T) / (9 * T * iv.sqrt(T)))

    def h_over_c(self, t) -> Interval:
        return self._sym(self.eta(t) / self.c_bar)

    def dc_h(self, t) -> Interval:
        return self._sym(3 * self.eta(t) / self.c_bar)

    def dc_hint1(self, t) -> Interval:
        return self.hint1(t) * (3 / self.c_bar)

    def dc_hint2(self, t) -> Interval:
        return self.hint2(t) * (3 / self.c_bar)

    def dc_h_over_c(self, t) -> Interval:
        return self._sym(2 * self.eta(t) / self.c_bar ** 2)

    def E(self, t) -> Interval:
        return self.hint2(t)


NO_H = HCeiling(norm=0.0)


# ---------------------------------------------------------------------------
# the map and its partials

@dataclass
class _Kernels:
    t: Interval
    K0: Interval
    K1: Interval
    K0t: Interval
    K1t: Interval
    K0c: Interval
    K1c: Interval
    V: Interval
    Vt: Interval
    Vc: Interval
    Rc: Interval  # sqrt(t) e^t R / c
    q0: Interval


def _series_bank():
    K0, K1, V = outer_series(0), outer_series(1), V_series()
    from .special import q0_series

    return {
        "K0": K0, "K1": K1, "K0t": K0.dt(), "K1t": K1.dt(), "K0c": K0.dc(), "K1c": K1.dc(),
        "V": V, "Vt": V.dt(), "Vc": V.dc(), "Rc": residual_series().shift_s(1).reindex(1),
        "q0": q0_series(0),
    }


_BANK: dict | None = None


def _kernels(t: Interval, c: Interval, acc: float) -> _Kernels:
    global _BANK
    if _BANK is None:
        _BANK = _series_bank()
    from .special import far_context

    ctx = far_context(t, c, acc)
    vals = {k: s.evaluate(ctx) for k, s in _BANK.items()}
    return _Kernels(t=t, **vals)


def _params(a, b, c) -> tuple[Interval, Interval, Interval]:
    A, B, C = (v if isinstance(v, Interval) else Interval(Q(v)) for v in (a, b, c))
    if A.lo <= 0:
        raise DomainError("a must be positive")
    if C.mag > float(data.C_CEILING):
        raise DomainError("|c| must not exceed 1/4")
    return A, B, C


def _t_match(A: Interval, B: Interval) -> Interval:
    t = t_of_x(Interval(data.X_MATCH), A, B)
    if not (T_WINDOW[0] < t.lo and t.hi < T_WINDOW[1]):
        raise DomainError(f"t_m = [{t.lo:.6f}, {t.hi:.6f}] outside {T_WINDOW}")
    return t


def _n_values(A, B, C, bd: Boundary, hc: HCeiling, k: _Kernels):
    t = k.t
    x = Interval(data.X_MATCH)
    N1 = bd.Fp - A * k.K1 - A * hc.hint1(t)
    N2 = bd.F - x * N1 - iv.sqrt(A / 2) * (k.K0 + hc.hint2(t))
    W = k.V + hc.h_over_c(t)
    if W.lo <= 0:
        raise DomainError("V + h/c is not bounded away from zero")
    N3 = iv.exp(t) * bd.Fpp / (iv.sqrt(Interval(2.0)) * A * iv.sqrt(A) * W)
    return N1, N2, N3, W


def N_map(A, boundary: Boundary, h: HCeiling = HCeiling(), acc: float = DEFAULT_ACC):
    """Interval enclosure of (N1, N2/2, N3/2).

    ``A`` is a MatchVector or an (a, b, c) triple whose entries may be
    intervals.
    """
    a, b, c = A.abc if isinstance(A, MatchVector) else A
    Ai, Bi, Ci = _params(a, b, c)
    t = _t_match(Ai, Bi)
    k = _kernels(t, Ci, acc)
    N1, N2, N3, _ = _n_values(Ai, Bi, Ci, boundary, h, k)
    return N1, N2 / 2, N3 / 2


def raw_partials(a, b, c, boundary: Boundary, h: HCeiling = HCeiling(),
                 acc: float = DEFAULT_ACC) -> list[list[Interval]]:
    """[[d_a N1, d_b N1, d_c N1], [.. N2 ..], [.. N3 ..]] over the given box."""
    A, B, C = _params(a, b, c)
    t = _t_match(A, B)
    k = _kernels(t, C, acc)
    x = Interval(data.X_MATCH)
    u = A * x + B
    ta = x * u / A - u * u / (2 * A * A)
    tb = u / A
    s = iv.sqrt(t)
    # N1 = F' - a K1(t, c) - a Hint1(t)
    h_t = h.h(t)
    hint1_t = iv.exp(-t) / s * h_t  # d/dt of Hint1
    a1 = -k.K1 - h.hint1(t) - A * (k.K1t + hint1_t) * ta
    b1 = -A * (k.K1t + hint1_t) * tb
    c1 = -A * (k.K1c + h.dc_hint1(t))
    # N2 = F - x N1 - sqrt(a/2) (K0 + Hint2)
    sa = iv.sqrt(A / 2)
    hint2_t = h.hint1(t) / s
    a2 = -x * a1 - (k.K0 + h.hint2(t)) / (4 * sa) - sa * (k.K0t + hint2_t) * ta
    b2 = -x * b1 - sa * (k.K0t + hint2_t) * tb
    c2 = -x * c1 - sa * (k.K0c + h.dc_hint2(t))
    # N3 = e^t F'' / (sqrt2 a^{3/2} W), W = V + h/c
    N1, N2, N3, W = _n_values(A, B, C, boundary, h, k)
    hc = h.h_over_c(t)
    E = h.E(t)
    hct = (
        -(k.q0 * iv.exp(t) / (2 * t)) * hc
        - k.V * E / (2 * t)
        - E / (2 * t) * hc
        - k.Rc
    )
    Wt = k.Vt + hct
    Wc = k.Vc + h.dc_h_over_c(t)
    a3 = N3 * (ta - 1.5 / A - Wt * ta / W)
    b3 = N3 * (tb - Wt * tb / W)
    c3 = -N3 * Wc / W
    return [[a1, b1, c1], [a2, b2, c2], [a3, b3, c3]]


WEIGHTS = ((1, 2, 2), (0.5, 1, 1), (0.5, 1, 1))
ENTRY_NAMES = (("aN1", "bN1", "cN1"), ("aN2", "bN2", "cN2"), ("aN3", "bN3", "cN3"))


@dataclass(frozen=True)
class JacobianBound:
    beta: float
    entries: dict[str, float]

    @property
    def contracts(self) -> bool:
        return self.beta < 1


def frobenius_bound(partials) -> JacobianBound:
    total = Interval(0.0)
    entries = {}
    for i in range(3):
        for j in range(3):
            m = Interval(partials[i][j].mag) * WEIGHTS[i][j]
            entries[ENTRY_NAMES[i][j]] = m.hi
            total = total + m * m
    return JacobianBound(iv.sqrt(Interval(0.0, total.hi)).hi, entries)


def ball_box(alpha, rho=data.RHO0) -> tuple[Interval, Interval, Interval]:
    """Bounding box of S_{A,alpha} in (a, b, c)."""
    a0, b0, c0 = nominal_params(alpha)
    r = Interval(Q(rho))
    sym = Interval(-r.hi, r.hi)
    return Interval(a0) + sym, Interval(b0) + 2 * sym, Interval(c0) + 2 * sym


def jacobian_norm(alpha, boundary: Boundary | None = None, h: HCeiling = HCeiling(),
                  box=None, acc: float = DEFAULT_ACC) -> JacobianBound:
    """Certified bound of sup ||J||_2 over the ball S_{A, alpha}."""
    boundary = boundary or boundary_data(alpha)
    a, b, c = box or ball_box(alpha)
    return frobenius_bound(raw_partials(a, b, c, boundary, h, acc))


def residual_norm(A: MatchVector, boundary: Boundary, h: HCeiling = HCeiling(),
                  acc: float = DEFAULT_ACC) -> float:
    """sup ||A - N[A]||_2 over the uncertainty in boundary data and h."""
    N = N_map(A, boundary, h, acc)
    sq = Interval(0.0)
    for x, n in zip(A.as_tuple(), N):
        d = Interval(x) - n
        sq = sq + Interval(d.mag) ** 2
    return iv.sqrt(Interval(0.0, sq.hi)).hi


# ---------------------------------------------------------------------------
# fixed point

@dataclass(frozen=True)
class MatchCertificate:
    alpha: float
    A_star: MatchVector
    beta: float
    initial_residual: float
    iterations: int
    radius: float
    final_residual: float
    entries: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def gate_residual(self) -> float:
        """(1 - beta) rho0, the ceiling for the initial residual."""
        return (1 - self.beta) * float(data.RHO0)

    @property
    def certified(self) -> bool:
        return self.beta < 1 and self.initial_residual <= self.gate_residual


def solve_match(alpha, h: HCeiling = HCeiling(), acc: float = DEFAULT_ACC,
                tol: float = STEP_TOL, max_iter: int = MAX_ITER) -> tuple[FarParams, MatchCertificate]:
    """Certified fixed point of A = N[A] in S_{A, alpha}."""
    t0 = time.perf_counter()
    aq = _check_alpha(alpha)
    bd = boundary_data(aq)
    jb = jacobian_norm(aq, bd, h, acc=acc)
    if not jb.contracts:
        raise MatchingError(f"no contraction at alpha={float(aq):g}: beta bound {jb.beta:.6g}")
    A0 = MatchVector.nominal(aq)
    res0 = residual_norm(A0, bd, h, acc)
    gate = (1 - jb.beta) * float(data.RHO0)
    if res0 > gate:
        raise MatchingError(
            f"initial residual {res0:.6g} exceeds (1-beta) rho0 = {gate:.6g} at alpha={float(aq):g}"
        )
    # iterate on midpoints with exact boundary centres and h switched off
    centre = Boundary(Interval(bd.F.mid), Interval(bd.Fp.mid), Interval(bd.Fpp.mid))
    A = A0
    it = 0
    while True:
        it += 1
        if it > max_iter:
            raise MatchingError(f"no convergence in {max_iter} iterations")
        N = N_map(A, centre, NO_H, acc)
        nxt = MatchVector(*(n.mid for n in N))
        step = nxt.distance(A)
        A = nxt
        if nxt.distance(A0) > float(data.RHO0):
            raise MatchingError("iterate left S_{A,alpha}")
        if step < tol:
            break
    # a-posteriori enclosure of the true fixed point
    fin = residual_norm(A, bd, h, acc)
    radius = fin / (1 - jb.beta)
    if A.distance(A0) + radius > float(data.RHO0):
        raise MatchingError("enclosure is not contained in S_{A,alpha}")
    a, b, c = A.abc
    params = FarParams(a, b, c, alpha=float(aq), radius=radius, certified=True)
    cert = MatchCertificate(
        alpha=float(aq), A_star=A, beta=jb.beta, initial_residual=res0, iterations=it,
        radius=radius, final_residual=fin, entries=jb.entries,
        runtime=time.perf_counter() - t0,
    )
    return params, cert


def alpha_grid(n: int = 13) -> list:
    """Equispaced grid over [-3/50, 3/50], exact rationals."""
    lo, hi = data.ALPHA_MIN, data.ALPHA_MAX
    return [lo + (hi - lo) * Q(i) / (n - 1) for i in range(n)]


def _solve_one(alpha):
    return solve_match(alpha)


def match_sweep(alphas=None, jobs: int = 1) -> list[tuple[FarParams, MatchCertificate]]:
    alphas = alpha_grid() if alphas is None else list(alphas)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_solve_one, alphas))
    return [_solve_one(a) for a in alphas]
