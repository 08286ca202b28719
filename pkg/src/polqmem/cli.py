"""Command-line entry point: ``polqmem <subcommand> --config <path> [--seed N] [--out DIR] [--plot]``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .checks import run_selfcheck
from .config import ExperimentConfig, load_config, parse_config
from .errors import ConfigError, ConvergenceError, PolqmemError
from .experiments import (run_depth_sweep, run_efficiency_sweep, run_profile, run_stats,
                          run_tomography_experiment)
from .report import write_report

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3

RUNNERS = {
    "depth-sweep": run_depth_sweep,
    "efficiency-sweep": run_efficiency_sweep,
    "profile": run_profile,
    "tomography": run_tomography_experiment,
    "stats": run_stats,
    "selfcheck": run_selfcheck,
}

log = logging.getLogger("polqmem")


def _parse_set(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or "." not in key:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        out[key.strip()] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polqmem", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="experiment config file (defaults used if omitted)")
        sp.add_argument("--seed", type=int, help="master seed, overrides [run] seed")
        sp.add_argument("--out", default=".", help="output directory (default: current)")
        sp.add_argument("--plot", action="store_true", help="also write SVG figures")
        sp.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                        help="override one config key; repeatable")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        overrides = _parse_set(args.set)
        if args.seed is not None:
            overrides["run.seed"] = str(args.seed)
        if args.config:
            cfg = load_config(args.config, overrides)
        else:
            cfg = parse_config("", overrides) if overrides else ExperimentConfig().validate()
        log.info("config hash %s, seed %d", cfg.config_hash(), cfg.run.seed)
        report = RUNNERS[args.command](cfg)
        paths = write_report(report, args.out)
        if args.plot:
            from .plotting import PLOTTERS
            plotter = PLOTTERS.get(report.name)
            if plotter is not None:
                paths.append(plotter(report, args.out))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except PolqmemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    for p in paths:
        print(p)
    for key, value in report.summary.items():
        print(f"{key}: {value}")
    if report.name == "selfcheck":
        for row in report.tables["selfcheck"].rows:
            print(f"{'PASS' if row[1] else 'FAIL'} {row[0]} worst={row[2]:.3g} tol={row[3]:.0e}")
        if not report.summary["all_passed"]:
            return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
