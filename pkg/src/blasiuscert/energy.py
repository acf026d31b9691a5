"""Energy estimates for the linearised error equation and the contraction chain.

The chain walks the four subintervals left to right.  On each it forms

    B0 = M ||R|| + M1 |E(x_l)| + M2 |E'(x_l)| + M3 |E''(x_l)|

checks the two gate inequalities for the given epsilon and returns the
outgoing sup-norms of E, E' and E''.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence

from gmpy2 import mpq

from . import data
from . import interval as iv
from .bounds import SignChangeProof, residual_taylor_table, root_enclosure, verify_sign_change
from .exact import BiPoly, Q, round_dec, round_sig
from .interval import Interval
from .quasi import build_inner

Q_TO_G = {"Q": "G3", "Q1": "G1", "Q2": "G2"}
WEIGHT_MODES = ("unit", "exact")
READINGS = ("local", "cumulative")


class SignCertificationError(ValueError):
    """The sign change of a G function is not certified."""


class LemmaHypothesisError(ArithmeticError):
    """The contraction-lemma hypotheses fail on a subinterval."""

    def __init__(self, interval_id: str, inequality: int, lhs, rhs):
        self.interval_id = interval_id
        self.inequality = inequality
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(
            f"lemma hypotheses not satisfied on {interval_id}: inequality {inequality} "
            f"gives {float(lhs):.6g} >= {float(rhs):.6g}"
        )


@lru_cache(maxsize=None)
def sign_proof(name: str) -> SignChangeProof:
    inner = build_inner()
    return verify_sign_change(getattr(inner, name), data.SIGN_BRACKETS[name])


def _interval_id(interval) -> str:
    lo, hi = (Q(v) for v in interval)
    for k, (a, b) in enumerate(data.SUBINTERVALS, 1):
        if (a, b) == (lo, hi):
            return f"I{k}"
    return f"[{float(lo):g},{float(hi):g}]"


def quartic_integral(interval, alpha=data.ALPHA_MIN, weight: str = "unit") -> mpq:
    """Bound on the integral of (x - x_l)^4 F0''(x; alpha) / 4 over the interval.

    ``exact`` integrates the polynomial exactly.  ``unit`` uses
    w^5/20, the same integral with F0'' replaced by 1; it is kept only when
    it dominates the exact value, so it is always an upper bound.
    """
    xl, xr = (Q(v) for v in interval)
    if weight not in WEIGHT_MODES:
        raise ValueError(f"weight must be one of {WEIGHT_MODES}")
    inner = build_inner()
    y = BiPoly.x() - xl
    poly = (y ** 4) * mpq(1, 4) * inner.F0pp
    exact = poly.integrate_x(xl, xr)(0, Q(alpha))
    if weight == "exact":
        return exact
    return max((xr - xl) ** 5 / 20, exact)


def positive_part_integral(g: BiPoly, interval, alpha, proof: SignChangeProof) -> mpq:
    """Upper bound of the integral of max(g(x; alpha), 0) over the interval.

    ``proof`` certifies g > 0 before the bracket and g decreasing from the
    bracket on, so the positive set is [0, root).
    """
    if proof is None or not proof.certified:
        raise SignCertificationError("sign change of G is not certified")
    xl, xr = (Q(v) for v in interval)
    if xr <= xl:
        return mpq(0)
    alpha = Q(alpha)
    if proof.sign_before != 1:
        raise SignCertificationError("expected G positive before its bracket")
    root = root_enclosure(g, alpha, proof)
    gx = g.at_alpha(alpha)
    total = mpq(0)
    end = min(xr, root.lo)
    if end > xl:
        total += gx.integrate_x(xl, end)(0, 0)
    slack_lo = max(xl, root.lo)
    slack_hi = min(xr, root.hi)
    if slack_hi > slack_lo:
        total += (slack_hi - slack_lo) * max(gx(slack_lo, 0), mpq(0))
    return total


def q_integral_bound(interval, which: str = "Q", alpha=data.ALPHA_MIN, weight: str = "unit",
                     proof: SignChangeProof | None = None) -> mpq:
    """Upper bound of the integral of Q, Q1 or Q2 over the interval."""
    if which not in Q_TO_G:
        raise ValueError(f"which must be one of {sorted(Q_TO_G)}")
    xl, xr = (Q(v) for v in interval)
    if xr <= xl:
        return mpq(0)
    gname = Q_TO_G[which]
    proof = proof if proof is not None else sign_proof(gname)
    g = getattr(build_inner(), gname)
    return quartic_integral((xl, xr), alpha, weight) + positive_part_integral(g, (xl, xr), alpha, proof)


@dataclass(frozen=True)
class EnergyBounds:
    interval_id: str
    M: float
    M1: float
    M2: float
    M3: float
    exponents: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if min(self.M, self.M1, self.M2, self.M3) < 0:
            raise ValueError("energy bounds must be nonnegative")
        if any(v < 0 for v in self.exponents.values()):
            raise ValueError("exponent integrals must be nonnegative")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.M, self.M1, self.M2, self.M3)

    def displayed(self, decimals: int = 4) -> tuple[float, ...]:
        return tuple(float(round_dec(Q(v), decimals, "up")) for v in self.as_tuple())


def supremum_bounds(interval, alpha=data.ALPHA_MIN, weight: str = "unit") -> EnergyBounds:
    """M, M1, M2, M3 on one subinterval at the worst-case alpha."""
    xl, xr = (Q(v) for v in interval)
    alpha = Q(alpha)
    inner = build_inner()
    ints = {w: q_integral_bound((xl, xr), w, alpha, weight) for w in ("Q", "Q1", "Q2")}
    half_exp = {w: iv.exp(Interval(v) / 2) for w, v in ints.items()}
    d1 = inner.F0p(xr, alpha) - inner.F0p(xl, alpha)
    y = BiPoly.x() - xl
    moment = ((y * y) * inner.F0pp).integrate_x(xl, xr)(0, alpha)
    M1 = iv.sqrt(Interval(d1)) * half_exp["Q1"]
    M2 = iv.sqrt(Interval(moment)) * half_exp["Q1"]
    M3 = half_exp["Q2"]
    M = iv.sqrt(Interval(xr - xl)) * half_exp["Q"]
    return EnergyBounds(_interval_id((xl, xr)), M.hi, M1.hi, M2.hi, M3.hi, ints)


@lru_cache(maxsize=None)
def table1(weight: str = "unit") -> tuple[EnergyBounds, ...]:
    return tuple(supremum_bounds(rng, weight=weight) for rng in data.SUBINTERVALS)


# ---------------------------------------------------------------------------
# contraction chain

@dataclass(frozen=True)
class ChainState:
    interval_id: str
    width: mpq
    e_in: mpq
    e1_in: mpq
    e2_in: mpq
    r_norm: mpq
    B0: mpq
    eps: mpq
    e_out: mpq   # sup |E|
    e1_out: mpq  # sup |E'| (interval-local under the local reading)
    e2_out: mpq  # sup |E''|
    gate: tuple[mpq, mpq]

    def __post_init__(self):
        w = self.width
        if self.e2_out < self.B0 * (1 + self.eps) and self.B0 > 0:
            raise ValueError("E'' bound below B0 (1 + eps)")
        if self.e_out < self.e_in + w * self.e1_in + w * w / 2 * self.e2_out:
            raise ValueError("E bound below its Taylor estimate")

    def printed_row(self) -> dict[str, mpq]:
        """Row in the column order of the published table, B0 rounded up for display."""
        return {"B0": round_sig(self.B0, 5, "up") if self.B0 else self.B0, "eps": self.eps, "E": self.e2_out, "E'": self.e1_out, "E''": self.e_out}


def _ceil5(v: mpq, on: bool) -> mpq:
    return round_sig(v, 5, "up") if on and v != 0 else v


def contraction_gate(e_in, e1_in, e2_in, r_norm, bounds: EnergyBounds, eps, width,
                     reading: str = "local", interval_id: str = "", rounding: bool = True) -> ChainState:
    """Check the lemma inequalities and return the outgoing norms."""
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    e_in, e1_in, e2_in, r_norm, eps, w = (Q(v) for v in (e_in, e1_in, e2_in, r_norm, eps, width))
    M, M1, M2, M3 = (Q(v) for v in bounds.as_tuple())
    B0 = M * r_norm + M1 * e_in + M2 * e1_in + M3 * e2_in
    one_eps = 1 + eps
    base = M * (e_in + w * e1_in)
    lhs1 = base * one_eps + w * w * M * B0 * one_eps ** 2 / 2
    lhs2 = base + w * w * M * B0 * one_eps
    iid = interval_id or bounds.interval_id
    if not lhs1 < eps:
        raise LemmaHypothesisError(iid, 1, lhs1, eps)
    if not lhs2 < 1:
        raise LemmaHypothesisError(iid, 2, lhs2, 1)
    e2 = _ceil5(B0 * one_eps, rounding)
    local1 = _ceil5(w * e2, rounding)
    e1 = local1 if reading == "local" else _ceil5(e1_in + w * e2, rounding)
    e0 = _ceil5(e_in + w * e1_in + w * w / 2 * e2, rounding)
    return ChainState(iid, w, e_in, e1_in, e2_in, r_norm, B0, eps, e0, e1, e2, (lhs1, lhs2))


@dataclass(frozen=True)
class ChainResult:
    reading: str
    states: tuple[ChainState, ...]

    @property
    def e(self) -> mpq:
        return max(s.e_out for s in self.states)

    @property
    def e1(self) -> mpq:
        return max(s.e1_out for s in self.states)

    @property
    def e2(self) -> mpq:
        return max(s.e2_out for s in self.states)

    def published_labels(self) -> dict[str, mpq]:
        """The three final bounds under the labels of the published statement.

        The published statement names ``E''`` what the chain computes as
        sup|E|, and ``E`` what the chain computes as sup|E''|.
        """
        return {"E''": self.e, "E'": self.e1, "E": self.e2}


def _display_inputs(tab: Sequence[EnergyBounds], rounding: bool) -> list[EnergyBounds]:
    if not rounding:
        return list(tab)
    return [EnergyBounds(b.interval_id, *b.displayed(4)) for b in tab]


def residual_norms(rounding: bool = True) -> list[mpq]:
    out = []
    for rep in residual_taylor_table():
        v = rep.sup_abs
        out.append(round_sig(v, 5, "up") if rounding else v)
    return out


def propagate_chain(reading: str = "local", epsilons=None, r_norms=None, bounds=None,
                    rounding: bool = True, overrides: dict | None = None) -> ChainResult:
    """Run the gate on I1..I4 starting from zero initial error.

    ``overrides`` maps an interval index (0-based) to a dict of replacement
    energy bounds, e.g. ``{2: {"M": 0.7612}}``.
    """
    eps = [Q(v) for v in (epsilons or data.EPSILONS)]
    rn = [Q(v) for v in (r_norms if r_norms is not None else residual_norms(rounding))]
    tab = _display_inputs(bounds or table1(), rounding)
    for idx, repl in (overrides or {}).items():
        tab[idx] = replace(tab[idx], **repl)
    e = e1 = e2 = mpq(0)
    states = []
    for k, (xl, xr) in enumerate(data.SUBINTERVALS):
        st = contraction_gate(e, e1, e2, rn[k], tab[k], eps[k], xr - xl, reading, f"I{k + 1}", rounding)
        states.append(st)
        e, e1, e2 = st.e_out, st.e1_out, st.e2_out
    return ChainResult(reading, tuple(states))


def auto_epsilons(reading: str = "cumulative", rounding: bool = True, factor=mpq(5, 4), rounds: int = 60) -> list[mpq]:
    """Smallest-ish epsilons that pass the gates, found by a fixed-point sweep.

    Each epsilon is raised to ``factor`` times the first gate's left side
    until every gate passes.
    """
    eps = [Q(v) for v in data.EPSILONS]
    rn = residual_norms(rounding)
    tab = _display_inputs(table1(), rounding)
    for _ in range(rounds):
        e = e1 = e2 = mpq(0)
        changed = False
        for k, (xl, xr) in enumerate(data.SUBINTERVALS):
            try:
                st = contraction_gate(e, e1, e2, rn[k], tab[k], eps[k], xr - xl, reading, f"I{k + 1}", rounding)
            except LemmaHypothesisError as err:
                if err.inequality == 2:
                    raise
                eps[k] = round_sig(err.lhs * factor, 2, "up")
                changed = True
                break
            e, e1, e2 = st.e_out, st.e1_out, st.e2_out
        if not changed:
            return eps
    raise LemmaHypothesisError("chain", 1, mpq(1), mpq(0))


@lru_cache(maxsize=1)
def _cumulative_chain() -> ChainResult:
    return propagate_chain("cumulative", epsilons=auto_epsilons("cumulative"))


def chain_radii_at(x) -> dict[str, float]:
    """Per-subinterval radii from the cumulative chain at a point of [0, 5/2]."""
    x = Q(x)
    states = _cumulative_chain().states
    hits = [st for (xl, xr), st in zip(data.SUBINTERVALS, states) if xl <= x <= xr]
    if not hits:
        raise ValueError("x outside [0, 5/2]")
    return {
        "F": Interval(max(st.e_out for st in hits)).hi,
        "F'": Interval(max(st.e1_out for st in hits)).hi,
        "F''": Interval(max(st.e2_out for st in hits)).hi,
    }
