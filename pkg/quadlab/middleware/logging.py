import logging
import time
from typing import Callable

from quadlab.services.error_handler import handle_command_error

logger = logging.getLogger("quadlab.cli")


def run_logged(command: str, handler: Callable[..., int], args) -> int:
    """Run one subcommand, logging it with its exit status and duration."""
    start_time = time.time()

    logger.info(f"{command} - started")

    try:
        status = handler(args)
    except Exception as exc:
        status = handle_command_error(exc, command)

    duration = time.time() - start_time
    logger.info(f"{command} - Status: {status} - Duration: {duration:.3f}s")

    return status
