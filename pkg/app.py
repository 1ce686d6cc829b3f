# =====================================================
# app.py - accelrad command line entry point
# =====================================================

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from routes import equivalence_routes, eval_routes, sweep_routes, verify_routes
from utils.errors import EXIT_INPUT_ERROR, EXIT_NO_CONVERGENCE, AccelRadError
from utils.settings import get_settings

logger = logging.getLogger("accelrad")

COMMANDS = (eval_routes, sweep_routes, verify_routes, equivalence_routes)


def configure_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="accelrad",
        description="Two-photon excitation probabilities of an atom and a mirror "
                    "in relative acceleration",
    )
    parser.add_argument("--config", default=None, help="flat key = value run file")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("-v", "--verbose", action="store_true", help="same as --log-level DEBUG")
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker bound for sweeps (default ACCELRAD_JOBS)")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; every failure is mapped to an exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors exit 2, --help exits 0
        return int(exc.code or 0)

    try:
        settings = get_settings()
        level = "DEBUG" if args.verbose else (args.log_level or settings.log_level)
        configure_logging(level)
        logger.debug(f"🚀 accelrad {args.command}")
        return args.handler(args)

    except AccelRadError as exc:
        logger.debug("traceback", exc_info=True)
        marker = "⚠️ " if exc.exit_code == EXIT_NO_CONVERGENCE else "❌"
        print(f"{marker} {type(exc).__name__}: {exc.message}", file=sys.stderr)
        return exc.exit_code

    except ValidationError as exc:
        logger.debug("traceback", exc_info=True)
        for error in exc.errors():
            field = ".".join(str(part) for part in error.get("loc", ()))
            print(f"❌ invalid {field or 'input'}: {error.get('msg')}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    except (OSError, ValueError) as exc:
        logger.debug("traceback", exc_info=True)
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
