"""Command-line entry point: ``fpplab <subcommand> [flags]``.

Exit codes: 0 success, 2 invalid configuration, 3 probe or grid value
outside the window, 4 unwritable output.
"""

from __future__ import annotations

import argparse
import json
import sys

from fpplab.geometry import OutsideWindowError
from fpplab.harness.config import KINDS, ConfigError, ExperimentConfig
from fpplab.harness.runner import OUT_ENV, run

# per-subcommand defaults used when no --config is given
DEFAULTS = {
    "simulate": {"half_width": 30.0},
    "shape": {"half_width": 75.0, "radii": [50.0]},
    "busemann": {"half_width": 75.0, "alphas": [0.0], "n_values": [20.0]},
    "compete": {"half_width": 30.0, "seeds": {"layout": "polygon", "k": 2, "radius": 5.0}},
    "coexist": {"half_width": 60.0, "radii": [5.0, 10.0, 20.0, 40.0], "seeds": {"layout": "polygon", "k": 3, "radius": 5.0}},
    "census": {"half_width": 60.0, "n_values": [10.0, 20.0, 40.0]},
    "render": {"half_width": 20.0, "seeds": {"layout": "polygon", "k": 3, "radius": 5.0}},
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fpplab", description="First-passage percolation experiments on Poisson-Delaunay graphs.")
    sub = p.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        s = sub.add_parser(kind, help=f"run a {kind} experiment")
        s.add_argument("--config", help="JSON config file; flags below override its fields")
        s.add_argument("--seed", type=int, help="master seed")
        s.add_argument("--replicates", type=int)
        s.add_argument("--workers", type=int)
        s.add_argument("--out", help=f"output root (default: ${OUT_ENV} or ./fpplab-out)")
        s.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    return p


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
        if base.get("kind", args.command) != args.command:
            raise ConfigError("kind", f"config says {base['kind']!r} but subcommand is {args.command!r}")
    else:
        base = dict(DEFAULTS[args.command])
    base["kind"] = args.command
    for flag, name in (("seed", "master_seed"), ("replicates", "replicates"), ("workers", "workers"), ("out", "out")):
        val = getattr(args, flag)
        if val is not None:
            base[name] = val
    return ExperimentConfig.from_dict(base)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    if args.print_config:
        sys.stdout.write(cfg.to_json())
        return 0
    try:
        rec = run(cfg)
    except OutsideWindowError as exc:
        print(f"window error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 4
    print(rec.directory)
    return 0


if __name__ == "__main__":
    sys.exit(main())
