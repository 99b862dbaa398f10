# Load environment variables FIRST, before anything reads QUADLAB_* settings
import os
from pathlib import Path
from dotenv import load_dotenv

env_path = Path(os.getenv("QUADLAB_ENV_FILE", Path.cwd() / ".env"))
if env_path.exists():
    load_dotenv(env_path)

import argparse
import logging
import sys
from typing import List, Optional

from quadlab import __version__
from quadlab.commands import experiment, lemmas, report, residual, solve_space
from quadlab.middleware.logging import run_logged
from quadlab.services.error_handler import ValidationFailure, error_message, handle_command_error
from quadlab.services.settings import get_settings

logger = logging.getLogger("quadlab.cli")

COMMANDS = [residual, lemmas, solve_space, experiment, report]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadlab",
        description="Exact and numerical laboratory for the quadratic-type functional equation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--format", choices=["jsonl", "csv"], help="report format (default: QUADLAB_OUTPUT_FORMAT)")
    parser.add_argument("--output", help="write the report to this path instead of stdout")
    parser.add_argument("--seed", type=int, help="seed for sampling and random scalars")
    parser.add_argument("--log-level", help="logging level (default: QUADLAB_LOG_LEVEL)")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for command in COMMANDS:
        command.add_parser(subparsers)
    return parser


def configure_logging(level: str) -> None:
    numeric = getattr(logging, level.upper(), logging.INFO)
    logging.basicConfig(
        level=numeric,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    logging.getLogger("quadlab").setLevel(numeric)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)

    try:
        settings = get_settings()
    except ValueError as exc:
        configure_logging(args.log_level or "INFO")
        return handle_command_error(ValidationFailure(f"invalid QUADLAB_* setting: {error_message(exc)}"), "settings")
    configure_logging(args.log_level or settings.log_level)

    args.format_explicit = args.format
    args.format = args.format or settings.output_format

    return run_logged(args.command, args.handler, args)


if __name__ == "__main__":
    sys.exit(main())
