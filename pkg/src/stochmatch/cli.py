"""Command line entry point: ``stochmatch run|sweep|gen|verify|opt``."""

from __future__ import annotations

import argparse
import sys

from . import harness
from .algorithms import verify_trace_records
from .errors import CertificateFailure, StochMatchError
from .graph import format_edge_list
from .stochastic import EXACT_LIMIT, omniscient_opt_exact, omniscient_opt_mc

_FLAG_KEYS = ("graph", "gen", "p", "eps", "rounds", "trials", "seed", "mode", "certs", "out")


def _add_experiment_flags(sp):
    sp.add_argument("--config", help="key=value file; flags override its values")
    sp.add_argument("--graph", help="edge-list file")
    sp.add_argument("--gen", help="generator spec, e.g. 'gnm(16, 32)'")
    sp.add_argument("--p", help="edge probability, or 'per-edge' to keep file values")
    sp.add_argument("--eps", help="epsilon, e.g. 1/2")
    sp.add_argument("--rounds", help="round count or 'auto'")
    sp.add_argument("--trials", help=f"trial count (default {harness.DEFAULT_TRIALS})")
    sp.add_argument("--seed")
    sp.add_argument("--mode", choices=["adaptive", "nonadaptive", "both"])
    sp.add_argument("--certs", choices=["on", "off"])
    sp.add_argument("--out", help="CSV output path (trace goes next to it)")
    sp.add_argument("--timing", action="store_true", help="fill the secs column")


def _config(args) -> harness.ExperimentConfig:
    values = harness.read_config_file(args.config) if args.config else {}
    for key in _FLAG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            values[key] = val
    if getattr(args, "timing", False):
        values["timing"] = "on"
    # a flag-chosen graph source replaces the file's
    if args.graph is not None:
        values.pop("gen", None)
    if args.gen is not None:
        values.pop("graph", None)
    return harness.config_from_mapping(values)


def _print_csv(results, out):
    text = harness.format_csv(results)
    if not out:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    cfg = _config(args)
    try:
        result = harness.run_experiment(cfg)
    except CertificateFailure as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return 2
    _print_csv([result], cfg.out)
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    results = harness.sweep(cfg, args.axis, values)
    _print_csv(results, cfg.out)
    return 2 if any(r.cert_failures for r in results) else 0


def cmd_gen(args) -> int:
    g = harness.gen_graph(args.gen, int(args.seed), float(args.p))
    text = format_edge_list(g)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    records = harness.read_trace(args.trace)
    problems = verify_trace_records(records)
    for msg in problems:
        print(msg)
    print(f"{len(records)} records checked, {len(problems)} problem(s)")
    return 1 if problems else 0


def cmd_opt(args) -> int:
    values = {"trials": args.trials or "2", "seed": args.seed or "0"}
    for key in ("graph", "gen", "p"):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    cfg = harness.config_from_mapping(values)
    g = cfg.load_graph()
    if g.m <= EXACT_LIMIT and not args.trials:
        print(f"opt {omniscient_opt_exact(g)!r} exact")
    else:
        trials = int(args.trials or harness.DEFAULT_TRIALS)
        mean, se = omniscient_opt_mc(g, trials, cfg.seed)
        print(f"opt {mean!r} se {se!r} trials {trials}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stochmatch",
                                     description="Stochastic weighted matching experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="run one experiment")
    _add_experiment_flags(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="run one experiment per value of an axis")
    _add_experiment_flags(sp)
    sp.add_argument("--axis", required=True, choices=harness.SWEEP_AXES)
    sp.add_argument("--values", required=True, help="comma-separated values")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("gen", help="write a generated graph as an edge list")
    sp.add_argument("--gen", required=True)
    sp.add_argument("--seed", default="0")
    sp.add_argument("--p", default="0.5")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("verify", help="re-check the certificates in a trace file")
    sp.add_argument("trace")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("opt", help="print the omniscient optimum (exact or Monte Carlo)")
    sp.add_argument("--graph")
    sp.add_argument("--gen")
    sp.add_argument("--p")
    sp.add_argument("--trials", help="force Monte Carlo with this many trials")
    sp.add_argument("--seed")
    sp.set_defaults(func=cmd_opt)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StochMatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
