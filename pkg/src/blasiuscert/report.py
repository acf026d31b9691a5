"""Verification records, run configuration and the per-scope check registry."""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

from gmpy2 import mpq

from . import data
from . import reference as ref
from .exact import Q, round_dec, round_sig, _floor_log10

SCHEMA_VERSION = "1.0"
SIG_DIGITS = 6
SCOPES = ("residual", "ranges", "signs", "energy", "contraction", "farfield", "matching")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


# ---------------------------------------------------------------------------
# comparators

def _unit(claim: mpq, digits: int, kind: str) -> mpq:
    if kind == "dec":
        return mpq(1, 10 ** digits)
    e = _floor_log10(claim) if claim else 0
    return mpq(10) ** (e - digits + 1)


def _trunc(v: mpq, decimals: int) -> mpq:
    return round_dec(v, decimals, "down" if v >= 0 else "up")


def _pairs(claim, computed):
    if isinstance(claim, (tuple, list)):
        if not isinstance(computed, (tuple, list)) or len(claim) != len(computed):
            raise ValueError("claim and computed value have different shapes")
        return list(zip(claim, computed))
    return [(claim, computed)]


def compare(comparator: str, claim, computed) -> bool:
    """Pure pass/fail decision.

    ``le`` computed <= claim; ``ge`` computed >= claim; ``holds`` computed is
    true; ``rel:<tol>`` relative agreement; ``digits:<n>:<sig|dec>`` agreement
    within one unit of the n-th digit; ``trunc:<n>`` truncation to n decimals
    equals the claim; ``contains`` computed lies in the claimed interval.
    """
    head, _, rest = comparator.partition(":")
    if head == "holds":
        return bool(computed) is True
    if head == "contains":
        lo, hi = (Q(v) for v in claim)
        return lo <= Q(computed) <= hi
    pairs = [(Q(c), Q(v)) for c, v in _pairs(claim, computed)]
    if head == "le":
        return all(v <= c for c, v in pairs)
    if head == "ge":
        return all(v >= c for c, v in pairs)
    if head == "rel":
        tol = Q(rest)
        return all(abs(v - c) <= tol * abs(c) for c, v in pairs)
    if head == "digits":
        n, kind = rest.split(":")
        return all(abs(v - c) <= _unit(c, int(n), kind) for c, v in pairs)
    if head == "trunc":
        n = int(rest)
        return all(_trunc(v, n) == c for c, v in pairs)
    raise ValueError(f"unknown comparator {comparator!r}")


def fmt_number(v) -> str:
    """Six significant digits, round-half-even on the exact value."""
    q = Q(v)
    if q == 0:
        return "0.00000e+00"
    r = round_sig(q, SIG_DIGITS, "nearest")
    e = _floor_log10(r)
    mant = r / mpq(10) ** e
    digits = int(mant * 10 ** (SIG_DIGITS - 1))
    sign = "-" if digits < 0 else ""
    d = str(abs(digits))
    return f"{sign}{d[0]}.{d[1:]}e{e:+03d}"


def fmt_value(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, (tuple, list)):
        return [fmt_value(x) for x in v]
    if isinstance(v, str):
        return v
    return fmt_number(v)


@dataclass(frozen=True)
class VerificationRecord:
    check_id: str
    citation: str
    claim: object
    computed: object
    comparator: str
    passed: bool
    runtime: float = 0.0
    note: str = ""

    @classmethod
    def make(cls, check_id: str, citation: str, claim, computed, comparator: str,
             runtime: float = 0.0, note: str = "") -> "VerificationRecord":
        return cls(check_id, citation, claim, computed, comparator,
                   compare(comparator, claim, computed), runtime, note)

    def to_dict(self) -> dict:
        out = {
            "check_id": self.check_id,
            "citation": self.citation,
            "claim": fmt_value(self.claim),
            "computed": fmt_value(self.computed),
            "comparator": self.comparator,
            "pass": self.passed,
        }
        if self.note:
            out["note"] = self.note
        return out

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag} {self.check_id} computed={fmt_value(self.computed)} "
                f"claim={fmt_value(self.claim)} [{self.comparator}] ({self.citation}) {self.runtime:.2f}s")


# ---------------------------------------------------------------------------
# configuration

def _fmt_cfg(v):
    if isinstance(v, (tuple, list)):
        return [_fmt_cfg(x) for x in v]
    if isinstance(v, (int, str)):
        return v
    q = Q(v)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class RunConfig:
    alpha_grid: tuple = ()
    x_knots: tuple = data.X_KNOTS
    alpha_knots: tuple = data.ALPHA_KNOTS
    epsilons: tuple = data.EPSILONS
    T: mpq = data.T_FLOOR
    T_cap: mpq = mpq(40)
    c_bound: mpq = data.C_CEILING
    quad_step: mpq = mpq(1, 100)
    residual_ceiling: mpq = ref.RESIDUAL_SUP
    out: str = ""
    jobs: int = 1

    def __post_init__(self):
        if not self.alpha_grid:
            from .matching import alpha_grid

            object.__setattr__(self, "alpha_grid", tuple(alpha_grid()))
        if len(self.epsilons) != len(data.SUBINTERVALS):
            raise ConfigError("epsilons needs one value per subinterval")
        if any(not data.ALPHA_MIN <= Q(a) <= data.ALPHA_MAX for a in self.alpha_grid):
            raise ConfigError("alpha grid must lie in [-3/50, 3/50]")
        if Q(self.T) < data.T_FLOOR or Q(self.T_cap) <= Q(self.T):
            raise ConfigError("need 1.96 <= T < T_cap")
        if not 0 < Q(self.c_bound) <= data.C_CEILING:
            raise ConfigError("c_bound must lie in (0, 1/4]")
        if Q(self.quad_step) <= 0:
            raise ConfigError("quad_step must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        for knots in (self.x_knots, self.alpha_knots):
            if list(knots) != sorted(set(knots)):
                raise ConfigError("knots must be strictly increasing")

    def echo(self) -> dict:
        return {f.name: _fmt_cfg(getattr(self, f.name)) for f in fields(self) if f.name not in ("out", "jobs")}

    def overrides(self) -> list[str]:
        base = RunConfig().echo()
        mine = self.echo()
        return sorted(k for k in mine if mine[k] != base[k])

    def grid(self):
        from .bounds import SubregionGrid

        return SubregionGrid(tuple(Q(v) for v in self.x_knots), tuple(Q(v) for v in self.alpha_knots))


_LIST_KEYS = {"alpha_grid", "x_knots", "alpha_knots", "epsilons"}
_SCALAR_KEYS = {"T", "T_cap", "c_bound", "quad_step", "residual_ceiling"}


def _parse_number(key: str, text: str) -> mpq:
    try:
        return Q(text.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise ConfigError(f"{key}: cannot parse {text!r} as a number") from err


def parse_config(text: str) -> RunConfig:
    """``key = value`` lines; lists are comma separated, optionally in brackets."""
    kw: dict = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in _LIST_KEYS:
            items = [s for s in val.strip("[]").split(",") if s.strip()]
            kw[key] = tuple(_parse_number(key, s) for s in items)
        elif key in _SCALAR_KEYS:
            kw[key] = _parse_number(key, val)
        elif key == "alpha_grid_n":
            from .matching import alpha_grid

            kw["alpha_grid"] = tuple(alpha_grid(int(val)))
        elif key == "jobs":
            kw["jobs"] = int(val)
        elif key == "out":
            kw["out"] = val
        else:
            raise ConfigError(f"line {n}: unknown key {key!r}")
    return RunConfig(**kw)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return parse_config(text)


# ---------------------------------------------------------------------------
# checks

def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def check_residual(cfg: RunConfig) -> list[VerificationRecord]:
    from .bounds import cheb_bound, residual_taylor_table
    from .quasi import build_inner

    grid = cfg.grid()
    tab, dt = _timed(lambda: residual_taylor_table(grid=grid, jobs=cfg.jobs))
    recs = []
    for k, rep in enumerate(tab, 1):
        iid = f"I{k}"
        recs.append(VerificationRecord.make(
            f"residual.taylor.{iid}", ref.CITATIONS["residual.taylor"] + f", {iid}",
            ref.RESIDUAL_TAYLOR[iid], (rep.lower, rep.upper), "digits:5:sig", dt / 4))
    R = build_inner().R
    for k, rng in enumerate(data.SUBINTERVALS, 1):
        iid = f"I{k}"
        v, dt = _timed(lambda: cheb_bound(R, x_range=rng, grid=grid))
        recs.append(VerificationRecord.make(
            f"residual.chebyshev.{iid}", ref.CITATIONS["residual.chebyshev"] + f", {iid}",
            ref.CHEB_SUBREGION[iid], v, "digits:5:sig", dt))
    return recs


def check_ranges(cfg: RunConfig) -> list[VerificationRecord]:
    from .bounds import range_tables, tm_range

    tab, dt = _timed(lambda: range_tables(grid=cfg.grid(), jobs=cfg.jobs))
    recs = [
        VerificationRecord.make(
            f"ranges.{rep.region}", ref.CITATIONS["ranges"] + f", {rep.region}",
            ref.RANGES[rep.region], (rep.lower, rep.upper), "digits:4:dec", dt / len(tab))
        for rep in tab
    ]
    (lo, hi), dt = _timed(tm_range)
    recs.append(VerificationRecord.make(
        "ranges.tm", ref.CITATIONS["tm"], ref.TM_RANGE, (lo.lo, hi.hi), "trunc:6", dt,
        note="published digits are a truncation"))
    return recs


def _slug(name: str) -> str:
    name = name.replace("F0'(x)-F0'(x_l)", "dF0'").replace(" on ", ".")
    return "".join(ch for ch in name if not ch.isspace())


def check_signs(cfg: RunConfig) -> list[VerificationRecord]:
    from .bounds import verify_alpha_monotonicity
    from .energy import sign_proof

    recs = []
    for name in ("G1", "G2", "G3"):
        proof, dt = _timed(lambda: sign_proof(name))
        lo, hi = data.SIGN_BRACKETS[name]
        recs.append(VerificationRecord.make(
            f"signs.{name}", ref.CITATIONS["signs"] + f", bracket [{float(lo):g}, {float(hi):g}]",
            True, proof.certified, "holds", dt, note=proof.reason))
    mono, dt = _timed(lambda: verify_alpha_monotonicity(grid=cfg.grid()))
    for e in mono.entries:
        recs.append(VerificationRecord.make(
            f"signs.monotone.{_slug(e.name)}", ref.CITATIONS["monotone"], True, e.certified, "holds",
            dt / len(mono.entries)))
    return recs


def check_energy(cfg: RunConfig) -> list[VerificationRecord]:
    from .bounds import cheb_bound, residual_taylor_table
    from .energy import table1
    from .quasi import build_inner

    tab, dt = _timed(lambda: residual_taylor_table(grid=cfg.grid()))
    sup = max(rep.sup_abs for rep in tab)
    recs = [VerificationRecord.make(
        "energy.residual_sup.taylor", ref.CITATIONS["residual_sup"], Q(cfg.residual_ceiling), sup, "le", dt)]
    g, dt = _timed(lambda: cheb_bound(build_inner().R))
    recs.append(VerificationRecord.make(
        "energy.residual_sup.chebyshev", ref.CITATIONS["residual.chebyshev"] + ", whole region",
        ref.CHEB_GLOBAL, g, "le", dt))
    t1, dt = _timed(table1)
    for b in t1:
        for name, v, claim in zip(("M", "M1", "M2", "M3"), b.as_tuple(), ref.TABLE1[b.interval_id]):
            recs.append(VerificationRecord.make(
                f"energy.table1.{b.interval_id}.{name}", ref.CITATIONS["table1"] + f", {b.interval_id}",
                claim, v, "rel:0.005", dt / 16))
    return recs


def check_contraction(cfg: RunConfig) -> list[VerificationRecord]:
    from .energy import LemmaHypothesisError, propagate_chain

    t0 = time.perf_counter()
    try:
        chain = propagate_chain("local", epsilons=cfg.epsilons)
    except LemmaHypothesisError as err:
        return [VerificationRecord.make(
            f"contraction.gate.{err.interval_id}", ref.CITATIONS["table2"], True, False, "holds",
            time.perf_counter() - t0, note=str(err))]
    dt = (time.perf_counter() - t0) / 4
    recs = []
    for st in chain.states:
        iid = st.interval_id
        recs.append(VerificationRecord.make(
            f"contraction.gate.{iid}", ref.CITATIONS["table2"] + f", {iid}", True,
            st.gate[0] < st.eps and st.gate[1] < 1, "holds", dt))
        row = st.printed_row()
        for col in ("B0", "E", "E'", "E''"):
            recs.append(VerificationRecord.make(
                f"contraction.table2.{iid}.{col}", ref.CITATIONS["table2"] + f", {iid}",
                ref.TABLE2[iid][col], row[col], "digits:5:sig", dt))
    for label, v in chain.published_labels().items():
        recs.append(VerificationRecord.make(
            f"contraction.final.{label}", ref.CITATIONS["inner"], ref.INNER_BOUNDS[label], v,
            "digits:5:sig", 0.0))
    return recs


def check_farfield(cfg: RunConfig) -> list[VerificationRecord]:
    from .farfield import h0_norm_bound, x_space_constants

    T, Tc, cb, h = float(cfg.T), float(cfg.T_cap), Q(cfg.c_bound), float(cfg.quad_step)
    res, dt = _timed(lambda: h0_norm_bound(T=T, c_bound=cb, T_cap=Tc, step=h))
    fine, dt2 = _timed(lambda: h0_norm_bound(T=T, c_bound=cb, T_cap=Tc, step=h / 2))
    change = abs(Q(res.bound) - Q(fine.bound)) / Q(fine.bound)
    recs = [
        VerificationRecord.make("farfield.h0_norm", ref.CITATIONS["h0"], ref.H0_TARGET, res.bound, "le", dt),
        VerificationRecord.make("farfield.h0_refinement", "quadrature refinement stability",
                                mpq(1, 100), change, "le", dt2),
    ]
    consts, dt = _timed(x_space_constants)
    for name, v in zip(("C_F''", "C_F'", "C_F"), consts):
        recs.append(VerificationRecord.make(
            f"farfield.constant.{name}", ref.CITATIONS["outer"], ref.OUTER_CONSTANTS[name], v,
            "digits:5:sig", dt / 3))
    return recs


def check_matching(cfg: RunConfig) -> list[VerificationRecord]:
    from .matching import MatchingError, MatchVector, boundary_data, jacobian_norm, residual_norm, solve_match

    t0 = time.perf_counter()
    bd = boundary_data(0)
    res0 = residual_norm(MatchVector.nominal(0), bd)
    beta = jacobian_norm(0, bd).beta
    dt = time.perf_counter() - t0
    recs = [
        VerificationRecord.make("matching.alpha0.residual", ref.CITATIONS["match.residual"],
                                ref.MATCH_RESIDUAL, res0, "le", dt / 2),
        VerificationRecord.make("matching.alpha0.beta", ref.CITATIONS["match.beta"],
                                ref.MATCH_BETA * ref.MATCH_BETA_SLACK, beta, "le", dt / 2),
    ]
    for a in cfg.alpha_grid:
        cid = f"matching.certificate.alpha={float(a):+.4f}"
        t0 = time.perf_counter()
        try:
            params, cert = solve_match(a)
            ok = cert.certified and params.in_trust_region()
            note = f"beta={cert.beta:.6g} residual={cert.initial_residual:.6g} radius={cert.radius:.6g}"
        except MatchingError as err:
            ok, note = False, str(err)
        recs.append(VerificationRecord.make(cid, ref.CITATIONS["match.cert"], True, ok, "holds",
                                            time.perf_counter() - t0, note=note))
    return recs


CHECKS = {
    "residual": check_residual,
    "ranges": check_ranges,
    "signs": check_signs,
    "energy": check_energy,
    "contraction": check_contraction,
    "farfield": check_farfield,
    "matching": check_matching,
}


def _run_scope(args):
    scope, cfg = args
    return CHECKS[scope](cfg)


def run_scopes(scopes, cfg: RunConfig) -> list[VerificationRecord]:
    scopes = list(SCOPES) if "all" in scopes else list(scopes)
    for s in scopes:
        if s not in CHECKS:
            raise ConfigError(f"unknown scope {s!r}")
    if cfg.jobs > 1 and len(scopes) > 1:
        inner = RunConfig(**{f.name: getattr(cfg, f.name) for f in fields(cfg) if f.name != "jobs"})
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            batches = list(pool.map(_run_scope, [(s, inner) for s in scopes]))
    else:
        batches = [CHECKS[s](cfg) for s in scopes]
    recs = [r for b in batches for r in b]
    return sorted(recs, key=lambda r: r.check_id)


@dataclass
class Report:
    config: RunConfig
    scopes: tuple
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[VerificationRecord]:
        return [r for r in self.records if not r.passed]

    def document(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "number_format": {"significant_digits": SIG_DIGITS, "rounding": "half-even"},
            "scopes": list(self.scopes),
            "config": self.config.echo(),
            "overrides": self.config.overrides(),
            "records": [r.to_dict() for r in sorted(self.records, key=lambda r: r.check_id)],
            "summary": {
                "total": len(self.records),
                "passed": sum(r.passed for r in self.records),
                "failed": len(self.failures),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.document(), indent=2, sort_keys=False) + "\n"

    def text(self) -> str:
        lines = [r.line() for r in self.records]
        s = self.document()["summary"]
        lines.append(f"{s['passed']}/{s['total']} records pass")
        return "\n".join(lines) + "\n"


def verify(scopes, cfg: RunConfig | None = None) -> Report:
    cfg = cfg or RunConfig()
    scopes = tuple(scopes)
    return Report(cfg, scopes, run_scopes(scopes, cfg))
