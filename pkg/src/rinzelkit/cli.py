"""CLI entry point for rinzelkit."""

import argparse
import logging
import sys
from pathlib import Path

from dotenv import load_dotenv

from rinzelkit import __version__
from rinzelkit.commands import COMMANDS, Engine
from rinzelkit.config import Config

logger = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _jobs(value: str) -> int:
    jobs = int(value)
    if jobs < 1:
        raise argparse.ArgumentTypeError(f"--jobs must be >= 1 (got {value})")
    return jobs


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments.

    Args:
        argv: Argument list to parse (defaults to sys.argv[1:]).
    """
    parser = argparse.ArgumentParser(
        prog="rinzelkit",
        description="Simulate, certify and solve the FitzHugh-Rinzel model",
    )
    parser.add_argument(
        "command",
        choices=list(COMMANDS),
        help="Subcommand to run",
    )
    parser.add_argument(
        "--config",
        type=Path,
        help="JSON run configuration",
    )
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one config key (bare keys address params, dotted keys address sections)",
    )
    parser.add_argument(
        "--jobs",
        type=_jobs,
        default=None,
        help="Worker processes for scan, kernel and picard (default: all CPUs)",
    )
    parser.add_argument(
        "--out",
        type=Path,
        default=Path("."),
        help="Output directory (default: current directory)",
    )
    parser.add_argument(
        "--optimize-eps1",
        action="store_true",
        help="certify: pick the slack minimizing C1/C",
    )
    parser.add_argument(
        "--crosscheck",
        action="store_true",
        help="picard: also run the method-of-lines solver and report the gap",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> None:
    """Main entry point for rinzelkit CLI."""
    args = parse_args(argv)

    load_dotenv()

    try:
        config = Config.from_file(args.config, args.overrides)
    except ValueError as exc:
        print(f"Configuration error: {exc}", file=sys.stderr)
        sys.exit(EXIT_INPUT)

    config.setup_logging()
    logger.debug("Config: %s", config)

    engine = Engine(config, out_dir=args.out, jobs=args.jobs)

    try:
        engine.run(args.command, optimize_eps1=args.optimize_eps1, crosscheck=args.crosscheck)
    except ValueError as exc:
        logger.error("%s rejected its input: %s", args.command, exc)
        print(f"Error: {exc}", file=sys.stderr)
        sys.exit(EXIT_INPUT)
    except RuntimeError as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"Numerical failure: {exc}", file=sys.stderr)
        sys.exit(EXIT_NUMERICAL)
    except Exception:
        logger.exception("%s failed", args.command)
        sys.exit(EXIT_NUMERICAL)
