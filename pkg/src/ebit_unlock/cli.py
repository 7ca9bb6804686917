"""``ebit-unlock`` command-line interface.

Exit codes: 0 success, 1 invariant or verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

from . import __version__, ensembles
from .errors import InvariantViolation
from .measures import DIAGNOSTICS, UNDEFINED, analyze
from .sampling import VERIFY_INVARIANTS, SampleConfig, sweep, verify
from .search import search

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

OBJECTIVE_NAMES = {
    "rate-bound": "rate_bound",
    "gap-upper": "gap_upper",
    "certified-low": "certified_low",
    "min-rate-bound": "negative_rate_bound",
}

SAMPLE_COLUMNS = [
    "seed", "trial", "S_A", "S_B", "S_AB", "H", "E_source", "concavity_upper",
    "hashing_max", "gap_upper", "rate_bound", "violations",
]

ANALYZE_COLUMNS = [
    "S_A", "S_B", "S_AB", "H_labels", "E_source", "concavity_upper", "hashing_AtoB",
    "hashing_BtoA", "hashing_max", "hashing_max_floored", "gap_upper", "rate_bound",
    "log_negativity", "eof_two_qubit", "certified_low", "certified_high", "violations",
]


def fmt(x) -> str:
    """Render a number with 12 significant digits."""
    if isinstance(x, str):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        return UNDEFINED
    return format(x + 0.0, ".12g")


def render(obj):
    """Round every float in a JSON-ready structure to 12 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return UNDEFINED
        return float(format(obj + 0.0, ".12g"))
    if isinstance(obj, dict):
        return {k: render(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [render(v) for v in obj]
    try:
        return render(float(obj))
    except TypeError:
        raise TypeError(f"cannot render {type(obj).__name__}") from None


def manifest(command: str, config: dict, seed, started: float) -> dict:
    return {
        "command": command,
        "config_echo": config,
        "seed": seed,
        "tool_version": __version__,
        "wall_time_ms": int(round((time.perf_counter() - started) * 1000)),
    }


def dump_json(doc, out) -> None:
    out.write(json.dumps(render(doc), indent=2, allow_nan=False) + "\n")


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _diagnostics(text: str) -> tuple[str, ...]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    if names == ["all"]:
        return DIAGNOSTICS
    bad = [n for n in names if n not in DIAGNOSTICS]
    if bad:
        raise argparse.ArgumentTypeError(
            f"unknown diagnostics {bad}; choose from {', '.join(DIAGNOSTICS)} or 'all'"
        )
    return tuple(names)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ebit-unlock",
        description="Entanglement unlocking bounds for pure-state quantum sources.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="report entropies and bounds for an ensemble file")
    a.add_argument("path", help="ensemble JSON file")
    a.add_argument("--format", choices=("json", "csv"), default="json")
    a.add_argument("--diagnostics", type=_diagnostics, default=(),
                   help="comma-separated: lognegativity, eof (two-qubit only), or all")

    s = sub.add_parser("sample", help="analyze seeded Haar-random ensembles")
    s.add_argument("--dimA", type=_positive, required=True)
    s.add_argument("--dimB", type=_positive, required=True)
    s.add_argument("--num-states", type=_positive, required=True)
    s.add_argument("--trials", type=_positive, required=True)
    s.add_argument("--seed", type=_seed, required=True)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--summary", action="store_true",
                   help="append a JSON summary footer line (starts with '#') to the CSV")
    s.add_argument("--emit-ensembles", metavar="DIR",
                   help="write each sampled ensemble to DIR/trial_<index>.json")
    s.add_argument("--workers", type=_positive, default=1)

    q = sub.add_parser("search", help="derivative-free search for extremal ensembles")
    q.add_argument("--objective", choices=tuple(OBJECTIVE_NAMES), required=True)
    q.add_argument("--dimA", type=_positive, required=True)
    q.add_argument("--dimB", type=_positive, required=True)
    q.add_argument("--num-states", type=_positive, required=True)
    q.add_argument("--budget", type=_positive, required=True)
    q.add_argument("--seed", type=_seed, required=True)
    q.add_argument("--emit-ensemble", metavar="PATH", help="write the best ensemble here")

    v = sub.add_parser("verify", help="run the randomized invariant suite")
    v.add_argument("--trials", type=_positive, required=True)
    v.add_argument("--seed", type=_seed, required=True)
    v.add_argument("--max-dim", type=_positive, default=4)
    v.add_argument("--max-states", type=_positive, default=6)
    v.add_argument("--multicopy-N", dest="multicopy_n", type=int, choices=(0, 2, 3), default=0)
    v.add_argument("--inject-fault", choices=VERIFY_INVARIANTS, action="append", default=[],
                   help=argparse.SUPPRESS)
    return p


def _report_doc(ens, report) -> dict:
    doc = report.to_dict()
    doc["dims"] = [ens.dim_a, ens.dim_b]
    doc["num_states"] = len(ens)
    doc["dropped_zero_probability"] = ens.dropped
    return doc


def _analyze_row(report) -> dict:
    d = report.to_dict()
    diag = d.pop("diagnostics")
    row = {k: d[k] for k in ANALYZE_COLUMNS if k in d}
    row["log_negativity"] = diag.get("log_negativity", "")
    row["eof_two_qubit"] = diag.get("eof_two_qubit", "")
    interval = diag.get("certified_rate_interval", "")
    if isinstance(interval, list):
        row["certified_low"], row["certified_high"] = interval
    else:
        row["certified_low"] = row["certified_high"] = interval
    row["violations"] = ";".join(v.invariant for v in report.violations)
    return {k: fmt(v) if not isinstance(v, str) else v for k, v in row.items()}


def cmd_analyze(args, out, err) -> int:
    started = time.perf_counter()
    ens = ensembles.load(args.path)
    try:
        report = analyze(ens, args.diagnostics)
    except InvariantViolation as exc:
        err.write(f"error: {exc}\n")
        return EXIT_FAIL
    if args.format == "csv":
        w = csv.DictWriter(out, fieldnames=ANALYZE_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerow(_analyze_row(report))
        return EXIT_OK
    doc = _report_doc(ens, report)
    doc["manifest"] = manifest(
        "analyze",
        {"path": str(args.path), "format": args.format, "diagnostics": list(args.diagnostics)},
        None,
        started,
    )
    dump_json(doc, out)
    return EXIT_OK


def cmd_sample(args, out, err) -> int:
    started = time.perf_counter()
    cfg = SampleConfig(args.dimA, args.dimB, args.num_states, args.trials, args.seed)
    results = sweep(cfg, workers=args.workers)
    if args.emit_ensembles:
        outdir = Path(args.emit_ensembles)
        outdir.mkdir(parents=True, exist_ok=True)
        for r in results:
            ensembles.save(r.ensemble, outdir / f"trial_{r.trial}.json")
    n_bad = sum(1 for r in results if r.report.violations)
    config = {"dimA": cfg.dim_a, "dimB": cfg.dim_b, "num_states": cfg.num_states,
              "trials": cfg.trials, "seed": cfg.seed, "format": args.format}
    if args.format == "json":
        dump_json({
            "trials": [dict(_report_doc(r.ensemble, r.report), seed=r.seed, trial=r.trial)
                       for r in results],
            "trials_with_violations": n_bad,
            "manifest": manifest("sample", config, cfg.seed, started),
        }, out)
        return EXIT_OK
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SAMPLE_COLUMNS)
    for r in results:
        rep = r.report
        w.writerow([
            r.seed, r.trial, fmt(rep.s_a), fmt(rep.s_b), fmt(rep.s_ab), fmt(rep.h_labels),
            fmt(rep.e_source), fmt(rep.concavity_upper), fmt(rep.hashing_max),
            fmt(rep.gap_upper), fmt(rep.rate_bound),
            ";".join(v.invariant for v in rep.violations),
        ])
    if args.summary:
        footer = {"trials": cfg.trials, "trials_with_violations": n_bad,
                  "manifest": manifest("sample", config, cfg.seed, started)}
        out.write("# " + json.dumps(render(footer), allow_nan=False) + "\n")
    return EXIT_OK


def cmd_search(args, out, err) -> int:
    started = time.perf_counter()
    objective = OBJECTIVE_NAMES[args.objective]
    result = search(objective, (args.dimA, args.dimB), args.num_states, args.budget, args.seed)
    if args.emit_ensemble:
        ensembles.save(result.best_ensemble, args.emit_ensemble)
    config = {"objective": args.objective, "dimA": args.dimA, "dimB": args.dimB,
              "num_states": args.num_states, "budget": args.budget, "seed": args.seed}
    dump_json({
        "objective": args.objective,
        "best_objective": result.best_objective,
        "maximize": result.maximize,
        "evaluations": result.evaluations,
        "seed": result.seed,
        "trace": [list(t) for t in result.trace],
        "best_ensemble": ensembles.to_dict(result.best_ensemble),
        "manifest": manifest("search", config, args.seed, started),
    }, out)
    return EXIT_OK


def cmd_verify(args, out, err) -> int:
    started = time.perf_counter()
    summary = verify(args.trials, args.seed, args.max_dim, max_states=args.max_states,
                     multicopy_n=args.multicopy_n, flip=args.inject_fault)
    first = summary.failures[0] if summary.failures else None
    config = {"trials": args.trials, "seed": args.seed, "max_dim": args.max_dim,
              "max_states": args.max_states, "multicopy_N": args.multicopy_n}
    dump_json({
        "ok": summary.ok,
        "trials": summary.trials,
        "passes": summary.passes,
        "skipped": summary.skipped,
        "failure_count": len(summary.failures),
        "first_failure": None if first is None else {
            "seed": first.seed, "trial": first.trial,
            "invariant": first.invariant, "values": first.values,
        },
        "manifest": manifest("verify", config, args.seed, started),
    }, out)
    if first is not None:
        err.write(
            f"verification failed: invariant {first.invariant} at seed {first.seed}, "
            f"trial {first.trial}: {json.dumps(render(first.values))}\n"
        )
        return EXIT_FAIL
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "sample": cmd_sample, "search": cmd_search, "verify": cmd_verify}


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args, out, err)
    except (ValueError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main_exit() -> None:
    sys.exit(main())
