import logging
from typing import Optional

from pydantic import ValidationError

logger = logging.getLogger("quadlab.cli")

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_NON_CONVERGENCE = 3


class QuadlabError(Exception):
    """Base class for every failure the CLI turns into an exit status."""

    exit_code = EXIT_CHECK_FAILURE


class ValidationFailure(QuadlabError, ValueError):
    """A parameter violates a documented constraint (c ≠ 0, ±1; p ≠ 2; ...)."""

    exit_code = EXIT_VALIDATION


class EquationParameterError(ValidationFailure):
    pass


class IdentityParameterError(ValidationFailure):
    pass


class GridClosureError(ValidationFailure):
    pass


class ContractionError(ValidationFailure):
    """The requested Lipschitz constant is not in (0, 1)."""


class CheckFailure(QuadlabError):
    """A verification ran to completion and found a violated inequality."""

    exit_code = EXIT_CHECK_FAILURE


class HypothesisFailure(CheckFailure):
    """The control function does not dominate the residual on the sample."""

    def __init__(self, message: str, worst_ratio: float = 0.0):
        super().__init__(message)
        self.worst_ratio = worst_ratio


class BoundMismatch(CheckFailure):
    """Two formulas for the same stability bound disagree."""


class NonConvergence(QuadlabError):
    exit_code = EXIT_NON_CONVERGENCE

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


def _first_validation_message(exc: ValidationError) -> str:
    errors = exc.errors()
    if not errors:
        return str(exc)
    first = errors[0]
    loc = ".".join(str(part) for part in first.get("loc", ()))
    msg = first.get("msg", "invalid value")
    return f"{loc}: {msg}" if loc else msg


def error_message(exc: BaseException) -> str:
    if isinstance(exc, ValidationError):
        return _first_validation_message(exc)
    return str(exc) if str(exc) else exc.__class__.__name__


def handle_command_error(exc: BaseException, command: Optional[str] = None) -> int:
    """Log a command failure and return the exit status it maps to."""
    where = f"{command}: " if command else ""
    if isinstance(exc, ValidationError):
        logger.warning(f"{where}validation error - {_first_validation_message(exc)}")
        return EXIT_VALIDATION
    if isinstance(exc, QuadlabError):
        logger.warning(f"{where}{exc.__class__.__name__} - {exc}")
        return exc.exit_code
    logger.error(f"{where}unhandled exception: {exc}", exc_info=True)
    return EXIT_CHECK_FAILURE
