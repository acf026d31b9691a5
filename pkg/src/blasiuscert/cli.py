"""Command-line entry point."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .exact import Q
from .matching import MatchingError
from .quasi import QUANTITIES
from .report import SCOPES, ConfigError, RunConfig, load_config, verify
from .special import DomainError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _number(text: str):
    try:
        return Q(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blasiuscert", description="Certified Blasius quasi-solution checks.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=False):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--out", help="write output to this path")
        if config:
            sp.add_argument("--config", help="key = value configuration file")
            sp.add_argument("--jobs", type=int, default=None, help="worker processes")

    v = sub.add_parser("verify", help="run verification checks")
    v.add_argument("scope", choices=SCOPES + ("all",))
    common(v, config=True)

    e = sub.add_parser("eval", help="F, F', F'' with error radii")
    e.add_argument("--alpha", type=_number, required=True)
    e.add_argument("--x", type=_number, required=True)
    common(e)

    pr = sub.add_parser("profile", help="tabulate the certified profile as CSV")
    pr.add_argument("--alpha", type=_number, required=True)
    pr.add_argument("--xmax", type=_number, required=True)
    pr.add_argument("--step", type=_number, required=True)
    common(pr)

    w = sub.add_parser("wall-stress", help="a^{-3/2} with its radius")
    w.add_argument("--alpha", type=_number, required=True)
    common(w)
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _matched_if_needed(alpha, xs):
    from .data import X_MATCH
    from .matching import solve_match

    if any(x > X_MATCH for x in xs):
        return solve_match(alpha)[0]
    return None


def cmd_verify(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.jobs is not None:
        cfg = RunConfig(**{**{k: getattr(cfg, k) for k in cfg.__dataclass_fields__}, "jobs": args.jobs})
    report = verify([args.scope], cfg)
    out = args.out or cfg.out or None
    if args.json:
        _emit(report.to_json(), out)
    else:
        if out:
            Path(out).write_text(report.to_json(), encoding="utf-8", newline="\n")
        sys.stdout.write(report.text())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_eval(args) -> int:
    from .quasi import eval_with_envelope

    matched = _matched_if_needed(args.alpha, [args.x])
    env = eval_with_envelope(args.x, args.alpha, matched=matched)
    if args.json:
        doc = {"alpha": float(args.alpha), "x": float(args.x),
               "values": {k: {"value": v.value, "radius": v.radius} for k, v in env.items()}}
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        _emit("".join(f"{k} = {v.value:.12g} ± {v.radius:.5g}\n" for k, v in env.items()), args.out)
    return EXIT_OK


def profile_rows(alpha, xmax, step):
    from .quasi import eval_with_envelope

    if step <= 0 or xmax < 0:
        raise ConfigError("step must be positive and xmax nonnegative")
    n = int(xmax // step)
    xs = [step * i for i in range(n + 1)]
    matched = _matched_if_needed(alpha, xs)
    rows = []
    for x in xs:
        env = eval_with_envelope(x, alpha, matched=matched)
        row = [float(x)]
        for q in QUANTITIES:
            row += [env[q].value, env[q].radius]
        rows.append(row)
    return rows


def cmd_profile(args) -> int:
    rows = profile_rows(args.alpha, args.xmax, args.step)
    header = ["x"] + [c for q in QUANTITIES for c in (q, f"radius_{q}")]
    if args.json:
        _emit(json.dumps({"columns": header, "rows": rows}, indent=2) + "\n", args.out)
        return EXIT_OK
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{v:.12g}" if i % 2 == 1 or i == 0 else f"{v:.6g}" for i, v in enumerate(r)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_wall_stress(args) -> int:
    from .quasi import wall_stress

    cv = wall_stress(args.alpha)
    if args.json:
        _emit(json.dumps({"alpha": float(args.alpha), "wall_stress": cv.value, "radius": cv.radius}) + "\n", args.out)
    else:
        _emit(f"wall_stress = {cv.value:.10g} ± {cv.radius:.5g}\n", args.out)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "eval": cmd_eval, "profile": cmd_profile, "wall-stress": cmd_wall_stress}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except MatchingError as err:
        print(f"matching failed: {err}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
