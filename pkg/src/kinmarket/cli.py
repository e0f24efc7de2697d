"""Command line entry point: ``kinmarket <mode|preset> [--config PATH] [--out DIR] ...``.

Exit status: 0 on success, 1 on configuration errors, 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from kinmarket.errors import ConfigError, InitError, KinMarketError
from kinmarket.experiments import MODES, PRESETS, ExperimentConfig, load_config, parse_int_list, preset, run

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinmarket",
        description="Kinetic stock/bond market experiments (Monte Carlo, price ODE, Fokker-Planck).",
    )
    parser.add_argument("target", help=f"mode {MODES} or preset {PRESETS}")
    parser.add_argument("--config", help="key = value config file with [model]/[curve]/[initial]/[run] sections")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seeds", help="comma list or range, e.g. 0,1,2 or 0-19")
    parser.add_argument("--steps", type=int, help="number of market iterations")
    parser.add_argument("--dt", type=float, help="ODE step in market-iteration units")
    parser.add_argument("--mode", choices=MODES, help="override the mode when running a preset")
    parser.add_argument("--jobs", type=int, default=1, help="seeds simulated in parallel processes")
    parser.add_argument("--workers", type=int, help="threads per market step (results do not change)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args) -> ExperimentConfig:
    if args.target in PRESETS:
        cfg = preset(args.target)
        if args.config:
            cfg = load_config(args.config, base=cfg)
    elif args.target in MODES:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        cfg = replace(cfg, mode=args.target)
    else:
        raise ConfigError(f"unknown mode or preset {args.target!r}")
    overrides = {}
    if args.mode:
        overrides["mode"] = args.mode
    if args.seeds:
        try:
            overrides["seeds"] = parse_int_list(args.seeds)
        except ValueError as exc:
            raise ConfigError(f"bad --seeds {args.seeds!r}") from exc
    if args.steps is not None:
        overrides["steps"] = args.steps
        overrides["snapshot_times"] = tuple(t for t in cfg.snapshot_times if t <= args.steps) or (args.steps,)
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out:
        overrides["out"] = args.out
    return replace(cfg, **overrides) if overrides else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        run(cfg, jobs=args.jobs)
    except (ConfigError, InitError, OSError) as exc:
        print(f"kinmarket: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KinMarketError, ArithmeticError, ValueError) as exc:
        print(f"kinmarket: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
