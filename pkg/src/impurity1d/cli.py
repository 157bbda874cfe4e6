"""Command-line entry point: ``impurity1d {run,converge,golden}``."""

from __future__ import annotations

import argparse
import sys

from . import sweep
from .errors import ConfigurationError


def _override(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), sweep.parse_value(value)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="impurity1d",
        description="Bosons plus one impurity in a 1D harmonic trap: sweeps and reference data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "run": "solve every configured point and write CSV files plus manifest.json",
        "converge": "run each point on the cutoff ladder and report energy shifts",
        "golden": "write the infinite-coupling reference occupations and densities",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", metavar="PATH", help="key = value configuration file")
        p.add_argument("--out", metavar="DIR",
                       help=f"output directory (default ${sweep.OUT_ENV} or ./{sweep.DEFAULT_OUT})")
        p.add_argument("--jobs", metavar="N", type=int, help="worker processes (default 1)")
        p.add_argument("--seed", metavar="N", type=int, help="Lanczos start-vector seed (default 0)")
        p.add_argument("--set", metavar="KEY=VALUE", type=_override, action="append", default=[],
                       help="override one config key; repeatable, wins over --config")
        p.add_argument("-q", "--quiet", action="store_true", help="suppress the summary line")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = dict(args.set)
    overrides.update(out=args.out, jobs=args.jobs, seed=args.seed)
    try:
        config = sweep.load_config(args.config, overrides)
        manifest = getattr(sweep, args.command)(config, args.out)
    except ConfigurationError as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")
    if not args.quiet:
        counts = {}
        for p in manifest.points:
            counts[p["status"]] = counts.get(p["status"], 0) + 1
        text = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
        print(f"{args.command}: {len(manifest.points)} points ({text}) in {manifest.wall_time:.1f} s "
              f"-> {sweep.resolve_out(config) if args.out is None else args.out}")
        for p in manifest.points:
            if p["status"] == "error":
                print(f"  {p['key']}: {p['message']}", file=sys.stderr)
    return manifest.exit_code


if __name__ == "__main__":
    sys.exit(main())
