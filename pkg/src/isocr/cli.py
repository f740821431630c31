"""Command-line entry point: ``isocr {bounds,verify,protocol,optimize}``.

Exit status: 0 success, 1 verification failure, 2 usage or configuration
error, 3 I/O error.  Output files default to ``$ISOCR_OUTPUT_DIR`` when set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import bounds, protocols
from .errors import DomainError, InvalidStrategyError, IsocrError
from .serialize import fmt
from .strategy_io import load_strategy, save_strategy
from .suites import SUITES, SuiteConfig, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
OUTPUT_DIR_ENV = "ISOCR_OUTPUT_DIR"


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[float]:
    """``start:end:count`` (inclusive), a comma list, or a single number."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, end, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise UsageError(f"range {text!r}: count must be >= 1")
            if count == 1:
                if start != end:
                    raise UsageError(f"range {text!r}: a single step needs start == end")
                return [start]
            return [start + (end - start) * i / (count - 1) for i in range(count - 1)] + [end]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}; expected start:end:count") from None


def _default_dir() -> Path | None:
    d = os.environ.get(OUTPUT_DIR_ENV)
    return Path(d) if d else None


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def cmd_bounds(args) -> int:
    rhos = parse_range(args.rho)
    if not rhos or any(not 0 <= r <= 1 for r in rhos):
        raise UsageError("rho values must lie in [0, 1]")
    gammas = parse_range(args.gamma) if args.gamma else []
    if any(not 0 < g < 1 for g in gammas):
        raise UsageError("gamma values must lie in (0, 1)")
    models = args.model or ["free"]
    curves = []
    for m in dict.fromkeys(models):
        if m in ("classical", "quantum") and not gammas:
            raise UsageError(f"model {m!r} needs --gamma")
        curves.append(bounds.bound_curve(m, rhos, gammas if m in ("classical", "quantum") else None,
                                         k=args.k))
    out_dir = Path(args.output_dir) if args.output_dir else _default_dir()
    if out_dir is None:
        if args.format == "csv":
            sys.stdout.write("".join(c.to_csv(header=(i == 0)) for i, c in enumerate(curves)))
        elif len(curves) == 1:
            sys.stdout.write(curves[0].to_json())
        else:
            doc = {"meta": {"models": [c.model for c in curves],
                            "curves": {c.model: c.meta for c in curves}},
                   "rows": [r for c in curves for r in c.records()]}
            sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    for c in curves:
        path = out_dir / f"{c.model}.{args.format}"
        _write(path, c.to_csv() if args.format == "csv" else c.to_json())
        print(f"wrote {path} ({len(c.samples)} rows)", file=sys.stderr)
    return EXIT_OK


def _report_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "passed", "trials", "min_slack", "equality_max_abs_slack", "failures"])
    for r in results:
        eq = "" if r.equality_max_abs_slack is None else format(r.equality_max_abs_slack, ".6e")
        w.writerow([r.name, int(r.passed), r.trials, format(r.min_slack, ".6e"), eq, r.failure_count])
    return buf.getvalue()


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    cfg = SuiteConfig(trials=args.trials, seed=args.seed, tolerance=args.tolerance,
                      tamper=args.tamper)
    results = run_suites(args.suite or ["all"], cfg)
    doc = {
        "meta": {"seed": args.seed, "trials": args.trials, "tolerance": args.tolerance,
                 "suites": [r.name for r in results]},
        "passed": all(r.passed for r in results),
        "suites": [r.to_dict() for r in results],
    }
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n" if args.format == "json" else _report_csv(results)
    if args.report:
        _write(Path(args.report), text)
    else:
        sys.stdout.write(text)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: trials={r.trials} min_slack={r.min_slack:.3e}", file=sys.stderr)
        if not r.passed and args.format != "json":
            for f in r.failures:
                print(json.dumps(f.to_dict(), sort_keys=True), file=sys.stderr)
    return EXIT_OK if doc["passed"] else EXIT_FAIL


def cmd_protocol(args) -> int:
    path = Path(args.strategy)
    if not path.is_file():
        raise OSError(f"cannot read strategy file {path}")
    model, n, t, strat = load_strategy(path)
    rho = args.rho
    if not 0 <= rho <= 1:
        raise UsageError("rho must lie in [0, 1]")
    rec = {"model": model, "n": n, "t": t, "rho": rho}
    if model == "free":
        alice, bob = strat
        rec["success"] = protocols.success_free(alice, bob, rho, n)
        h = protocols.output_min_entropy(alice)
        k = args.k if args.k is not None else h
        rec.update(min_entropy=h, bound=bounds.bound_free(rho, k), bound_kind="free")
    elif model == "classical":
        rec["success"] = protocols.success_classical(strat, rho, n)
        h = protocols.output_min_entropy(strat)
        hj = protocols.output_min_entropy(strat, joint=True)
        k = args.k if args.k is not None else hj
        rec.update(min_entropy=h, joint_min_entropy=hj,
                   bound=bounds.best_classical_success_bound(rho, k, t), bound_kind="classical")
    else:
        rec["success"] = protocols.success_quantum(strat, rho, n, t)
        h = protocols.output_min_entropy(strat)
        k = args.k if args.k is not None else h
        rec.update(min_entropy=h, bound=bounds.best_quantum_success_bound(rho, k, t),
                   bound_kind="quantum")
    rec["bound_k"] = k
    for key in ("success", "min_entropy", "joint_min_entropy", "bound", "bound_k"):
        if key in rec:
            rec[key] = float(fmt(rec[key]))
    sys.stdout.write(json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_optimize(args) -> int:
    if not 0 <= args.rho <= 1:
        raise UsageError("rho must lie in [0, 1]")
    if not (1 <= args.n <= 3 and 1 <= args.k <= args.n):
        raise UsageError(f"need 1 <= k <= n <= 3, got n={args.n}, k={args.k}")
    res = protocols.seesaw_search(args.rho, args.n, args.k, iters=args.iters, seed=args.seed,
                                  restarts=args.restarts)
    ceiling = bounds.bound_free(args.rho, args.k)
    rec = {"rho": args.rho, "n": args.n, "k": args.k, "restarts": args.restarts,
           "seed": args.seed, "value": float(fmt(res.value)), "bound": float(fmt(ceiling))}
    if res.value > ceiling + 1e-8:
        print(f"seesaw value {res.value} exceeds the no-communication ceiling {ceiling}",
              file=sys.stderr)
        sys.stdout.write(json.dumps(rec, sort_keys=True) + "\n")
        return EXIT_FAIL
    out = Path(args.output) if args.output else (_default_dir() or Path(".")) / (
        f"seesaw_rho{fmt(args.rho)}_n{args.n}_k{args.k}.json")
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        save_strategy(out, (res.alice, res.bob), args.n)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror or exc}") from exc
    rec["strategy"] = str(out)
    sys.stdout.write(json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="isocr", description=(
        "Common randomness from noisy EPR pairs: bounds, inequality checks and "
        "protocol evaluation."))
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="emit bound and rate curves as CSV or JSON")
    b.add_argument("--model", action="append", choices=bounds.MODELS,
                   help="curve to emit (repeatable; default: free)")
    b.add_argument("--rho", default="0:1:11", help="rho grid, start:end:count (default 0:1:11)")
    b.add_argument("--gamma", help="gamma grid for classical/quantum bounds")
    b.add_argument("--k", type=float, default=1.0, help="min-entropy target in bits (default 1)")
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--output-dir", help=f"write <model>.<format> files here (default ${OUTPUT_DIR_ENV}, else stdout)")
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify", help="run seeded inequality suites")
    v.add_argument("--suite", action="append", choices=SUITES + ("all",),
                   help="suite to run (repeatable; default: all)")
    v.add_argument("--trials", type=int, default=200, help="random inputs per suite")
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--tolerance", type=float, default=1e-9, help="allowed negative slack")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--report", help="write the report here instead of stdout")
    v.add_argument("--tamper", type=float, default=0.0, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    pr = sub.add_parser("protocol", help="evaluate a strategy file")
    pr.add_argument("strategy", help="strategy JSON file")
    pr.add_argument("--rho", type=float, required=True)
    pr.add_argument("--k", type=float, help="min-entropy used for the bound (default: the strategy's)")
    pr.set_defaults(func=cmd_protocol)

    o = sub.add_parser("optimize", help="seesaw search for the best no-communication strategy")
    o.add_argument("--rho", type=float, required=True)
    o.add_argument("--n", type=int, default=1)
    o.add_argument("--k", type=int, default=1)
    o.add_argument("--restarts", type=int, default=20)
    o.add_argument("--iters", type=int, default=50)
    o.add_argument("--seed", type=int, default=1)
    o.add_argument("--output", help="strategy file to write")
    o.set_defaults(func=cmd_optimize)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidStrategyError, DomainError) as exc:
        print(f"isocr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"isocr {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except IsocrError as exc:
        print(f"isocr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
