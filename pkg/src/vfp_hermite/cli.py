"""Command line entry point: run | sweep | verify."""

from __future__ import annotations

import argparse
import os
import sys

from . import experiments, verify
from .config import ConfigError


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="configuration file (sectioned key=value)")
    parser.add_argument("--preset", choices=("test1", "test2"), help="built-in experiment preset")
    parser.add_argument("--out", metavar="DIR", help="output directory (overrides run.out)")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        metavar="N",
        help="parallel epsilon runs (default: VFP_THREADS or 1)",
    )
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration key, e.g. --set scheme.dt=1e-3",
    )


def _resolve_config(args) -> experiments.ExperimentConfig:
    if args.config is None and args.preset is None:
        raise ConfigError("give --config and/or --preset")
    base = experiments.preset(args.preset) if args.preset else None
    config = experiments.load_config(args.config, base=base) if args.config else base
    if args.overrides:
        config = experiments.apply_overrides(config, args.overrides)
    return config


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("VFP_THREADS", "")
    return max(1, int(env)) if env.isdigit() else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="vfp",
        description="Hermite / finite-volume solver for the 1D kinetic Fokker-Planck equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="advance the configured trajectories and write diagnostics")
    _add_common(run_parser)

    sweep_parser = sub.add_parser("sweep", help="run an epsilon sweep and summarize measured rates")
    _add_common(sweep_parser)

    verify_parser = sub.add_parser("verify", help="run the operator/elliptic/entropy invariant suite")
    verify_parser.add_argument("--n-x", type=int, default=64, help="cells for the check meshes")
    verify_parser.add_argument("--seed", type=int, default=2024)
    verify_parser.add_argument("--samples", type=int, default=100, help="random vectors per check")

    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return verify.print_suite(verify.run_suite(n_x=args.n_x, seed=args.seed, n_random=args.samples))
        config = _resolve_config(args)
        threads = _resolve_threads(args)
        if args.command == "run":
            return experiments.cmd_run(config, out_dir=args.out, threads=threads)
        return experiments.cmd_sweep(config, out_dir=args.out, threads=threads)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
