"""Command line: ``aahsim run`` and ``aahsim list-presets``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import presets, runner
from ._version import __version__
from .config import load_config
from .errors import ConfigError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aahsim", description="Generalized AAH chain simulator")
    parser.add_argument("--version", action="version", version=f"aahsim {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="YAML experiment file")
    src.add_argument("--preset", help="name from list-presets")
    run.add_argument("--out", type=Path,
                     help="output directory (default: out_dir from the config, else ./out/<preset or kind>)")
    run.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")
    run.add_argument("--workers", type=int, default=1, help="scan worker threads")
    run.add_argument("--render", action="store_true", help="also write PGM images")

    sub.add_parser("list-presets", help="show shipped presets")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "list-presets":
        print(presets.preset_table())
        return runner.EXIT_OK

    try:
        cfg = load_config(args.config) if args.config else presets.get_preset(args.preset)
    except (ConfigError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return runner.EXIT_CONFIG
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.workers < 1:
        print("config error: --workers must be >= 1", file=sys.stderr)
        return runner.EXIT_CONFIG
    out = args.out or Path(cfg.out_dir or Path("out") / (cfg.preset or cfg.kind))
    return runner.run(cfg, out, args.workers, args.render)


if __name__ == "__main__":
    sys.exit(main())
