"""Command-line entry point: ``biriesz experiment|kernel|indices|opnorm``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import BiRieszError
from .experiments import describe_registry, load_config_file, make_config, print_summary, run


def _registry_text():
    rows = describe_registry()
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name.ljust(width)}  {desc}" for name, desc in rows)


def _cmd_experiment(args):
    if args.list or not args.name:
        print(_registry_text())
        return 0
    data = load_config_file(args.config) if args.config else {}
    out_dir = args.out or data.get("out_dir") or Path("biriesz-runs") / args.name
    config = make_config(args.name, data, args.set or (), out_dir, args.force)
    report = run(config)
    print_summary(report)
    print(f"report written to {config.out_dir}")
    return 0 if report.passed else 1


def _cmd_kernel(args):
    from .specfun import KernelProfile, br_kernel

    profile = KernelProfile(2 * args.n, args.delta)
    r = np.linspace(0.0, args.rmax, args.points)
    values = br_kernel(profile, r)
    writer = csv.writer(sys.stdout, lineterminator="\r\n")
    writer.writerow(("r", "kernel"))
    for a, b in zip(r, values):
        writer.writerow((repr(float(a)), repr(float(b))))
    return 0


def _cmd_indices(args):
    from .indices import threshold_csv, to_fraction

    sys.stdout.write(threshold_csv(args.n, to_fraction(args.lattice)))
    return 0


def _cmd_opnorm(args):
    from .analysis import opnorm_lower
    from .indices import ExponentTriple
    from .operators import BilinearOp
    from .symbols import Symbol

    symbol = Symbol.load(args.symbol)
    parts = [s for s in args.triple.split(",") if s.strip()]
    triple = ExponentTriple.unchecked(*parts) if len(parts) == 3 else ExponentTriple.parse(args.triple)
    est = opnorm_lower(BilinearOp(symbol), triple, budget=args.budget, seeds=args.seeds, seed=args.seed)
    payload = est.save(args.out, Path(args.symbol).stem) if args.out else est.to_json()
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="biriesz", description="Bilinear Bochner-Riesz numerics.")
    parser.add_argument("--list", action="store_true", help="list the experiment registry and exit")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging to standard error")
    sub = parser.add_subparsers(dest="command")

    exp = sub.add_parser("experiment", help="run a named experiment")
    exp.add_argument("name", nargs="?")
    exp.add_argument("--list", action="store_true", help="list experiments")
    exp.add_argument("--config", help="TOML or JSON config file")
    exp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config value")
    exp.add_argument("--out", help="report directory (default biriesz-runs/NAME)")
    exp.add_argument("--force", action="store_true", help="ignore the N^(2n) sample cap")
    exp.set_defaults(func=_cmd_experiment)

    ker = sub.add_parser("kernel", help="tabulate the Bochner-Riesz kernel profile as CSV")
    ker.add_argument("--n", type=int, default=1)
    ker.add_argument("--delta", type=float, required=True)
    ker.add_argument("--rmax", type=float, default=20.0)
    ker.add_argument("--points", type=int, default=201)
    ker.set_defaults(func=_cmd_kernel)

    ind = sub.add_parser("indices", help="critical-delta table over a lattice as CSV")
    ind.add_argument("--n", type=int, required=True)
    ind.add_argument("--lattice", default="1/12")
    ind.set_defaults(func=_cmd_indices)

    op = sub.add_parser("opnorm", help="ascent lower bound for a stored symbol")
    op.add_argument("--symbol", required=True, help="BRGRID1 symbol file")
    op.add_argument("--triple", required=True, help="P1,P2[,P]")
    op.add_argument("--seeds", type=int, default=8)
    op.add_argument("--budget", type=int, default=50)
    op.add_argument("--seed", type=lambda s: int(s, 0), default=0xB1E55ED)
    op.add_argument("--out", help="directory for witnesses and JSON")
    op.set_defaults(func=_cmd_opnorm)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    if args.list:
        print(_registry_text())
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (BiRieszError, ValueError, OSError, KeyError, TypeError) as exc:
        print(f"biriesz: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
