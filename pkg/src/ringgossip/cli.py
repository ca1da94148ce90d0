"""Command line entry point: ``ringgossip {age,sweep,fit,simulate}``.

Exit codes: 0 success, 1 invalid arguments, 2 some sweep cells failed.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__, analytic
from .experiments import (
    ENGINES,
    MODELS,
    PLACEMENTS,
    SweepSpec,
    cell_partition,
    emit,
    fit_exponent,
    n_jammers,
    read_csv,
    run_metadata,
    run_sweep,
    series,
)
from .model import JammerPlacement, Rates, partition_from_placement, to_line_model, to_miniring_model
from .placement import system_age
from .sim import RNG_ALGORITHM, SimConfig, simulate

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(allowed):
    def parse(text):
        vals = tuple(v.strip() for v in text.split(",") if v.strip())
        bad = [v for v in vals if v not in allowed]
        if bad or not vals:
            raise argparse.ArgumentTypeError(f"choose from {','.join(allowed)}")
        return vals
    return parse


def _add_rates(p):
    p.add_argument("--lambda-s", type=float, default=1.0, help="source update rate")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="aggregate gossip rate")


def _add_sim(p):
    p.add_argument("--horizon", type=float, default=2e4)
    p.add_argument("--warmup", type=float, default=None, help="default: 10%% of horizon")
    p.add_argument("--replications", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)


def _add_partition(p):
    p.add_argument("--n", type=int, required=True, help="ring size")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--cuts", type=int, nargs="*", help="explicit cut link indices")
    g.add_argument("--placement", choices=PLACEMENTS, default="equidistant")
    p.add_argument("--jammers", type=int, default=0, help="number of jammers for --placement")
    p.add_argument("--model", choices=MODELS, default="line")
    p.add_argument("--placement-seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ringgossip", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON file of default option values")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("age", help="analytic ages of one jammed ring")
    _add_partition(p)
    _add_rates(p)
    p.add_argument("--per-node", action="store_true", help="also print per-node ages")

    p = sub.add_parser("simulate", help="Monte Carlo ages of one jammed ring")
    _add_partition(p)
    _add_rates(p)
    _add_sim(p)

    p = sub.add_parser("sweep", help="age against n for n = 2^k with round(c n^alpha) jammers")
    p.add_argument("--n-min", type=int, default=64)
    p.add_argument("--n-max", type=int, default=4096)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--placements", type=_csv_list(PLACEMENTS), default=PLACEMENTS)
    p.add_argument("--models", type=_csv_list(MODELS), default=MODELS)
    p.add_argument("--engines", type=_csv_list(ENGINES), default=("analytic",))
    _add_rates(p)
    _add_sim(p)
    p.add_argument("--out-dir", default="out")
    p.add_argument("--stem", default=None, help="output file stem (default sweep_alpha<alpha>)")
    p.add_argument("--plot", action="store_true", help="also render an SVG from the CSV")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("fit", help="log-log exponent of each series in a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--min-n", type=int, default=1)
    return parser


def _apply_config(parser, argv):
    pre, _ = parser.parse_known_args(argv)
    if not pre.config:
        return parser.parse_args(argv)
    try:
        with open(pre.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        parser.error(f"cannot read config {pre.config}: {exc}")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    if "lambda" in cfg:
        cfg["lam"] = cfg.pop("lambda")
    subparsers = parser._subparsers._group_actions[0].choices
    sp = subparsers.get(pre.command)
    for key, v in cfg.items():
        if key in ("placements", "models", "engines") and isinstance(v, list):
            cfg[key] = tuple(v)
    if sp is not None:
        sp.set_defaults(**cfg)
    return parser.parse_args(argv)


def _partition(args):
    if args.cuts is not None:
        placement = JammerPlacement(args.cuts)
        p = partition_from_placement(placement, args.n)
        return to_miniring_model(p) if args.model == "miniring" else to_line_model(p)
    return cell_partition(args.n, args.jammers, args.placement, args.model, args.placement_seed)


def _cmd_age(args):
    rates = Rates(args.lambda_s, args.lam, args.n)
    p = _partition(args)
    out = {
        "partition": [repr(s) for s in p.segments],
        "system_age": system_age(p, rates),
        "metadata": {"lambda_s": rates.lambda_s, "lambda": rates.lambda_, "n": rates.n,
                     "version": __version__},
    }
    if args.per_node:
        out["per_node_age"] = np.concatenate(
            [analytic.segment_ages(s, rates).ages for s in p.segments]).tolist()
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _cmd_simulate(args):
    rates = Rates(args.lambda_s, args.lam, args.n)
    p = _partition(args)
    res = simulate(SimConfig(rates, p, horizon=args.horizon, warmup=args.warmup,
                             seed=args.seed, replications=args.replications))
    out = {
        "partition": [repr(s) for s in p.segments],
        "system_age": res.system_age,
        "ci_halfwidth": res.ci_halfwidth,
        "analytic_system_age": system_age(p, rates),
        "events_processed": res.events_processed,
        "per_node_age": res.per_node_age.tolist(),
        "metadata": {**res.metadata, "version": __version__},
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _cmd_sweep(args):
    ns = []
    n = 1
    while n <= args.n_max:
        if n >= args.n_min:
            ns.append(n)
        n *= 2
    if not ns:
        raise ValueError(f"no power of two in [{args.n_min}, {args.n_max}]")
    spec = SweepSpec(
        n_values=tuple(ns), alpha=args.alpha, c=args.c, placements=args.placements,
        models=args.models, engines=args.engines, rates_ratio=args.lambda_s / args.lam,
        lambda_=args.lam, seed=args.seed, horizon=args.horizon, warmup=args.warmup,
        replications=args.replications,
    )
    records = run_sweep(spec, workers=args.workers)
    stem = args.stem or f"sweep_alpha{args.alpha:g}"
    paths = emit(records, args.out_dir, stem=stem, plot=args.plot, spec=spec)
    failed = [r for r in records if r.error]
    print(json.dumps({"files": [str(p) for p in paths], "cells": len(records),
                      "failed": len(failed), "metadata": run_metadata(spec)}, indent=2))
    return EXIT_PARTIAL if failed else EXIT_OK


def _cmd_fit(args):
    records = [r for r in read_csv(args.csv) if not r.error and r.n >= args.min_n]
    keys = sorted({(r.placement, r.model, r.engine) for r in records})
    rows = []
    for key in keys:
        s = series(records, *key)
        if len(s) < 4:
            continue
        slope, r2 = fit_exponent(s)
        rows.append({"placement": key[0], "model": key[1], "engine": key[2],
                     "points": len(s), "slope": slope, "r2": r2})
    print(json.dumps(rows, indent=2))
    return EXIT_OK if rows else EXIT_USAGE


COMMANDS = {"age": _cmd_age, "simulate": _cmd_simulate, "sweep": _cmd_sweep, "fit": _cmd_fit}


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"ringgossip: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
