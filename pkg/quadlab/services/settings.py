import os
from typing import Literal, Optional

from pydantic import BaseModel, Field

_settings: Optional["Settings"] = None


class Settings(BaseModel):
    log_level: str = "INFO"
    convergence_tol: float = Field(1e-10, gt=0)
    verify_tol: float = Field(1e-9, gt=0)
    max_iter: int = Field(100, ge=1)
    max_triples: int = Field(4096, ge=1)
    output_format: Literal["jsonl", "csv"] = "jsonl"


def get_settings() -> Settings:
    """
    Get or create the process-wide settings singleton from QUADLAB_* variables.
    """
    global _settings

    if _settings is None:
        _settings = Settings(
            log_level=os.getenv("QUADLAB_LOG_LEVEL", "INFO").upper(),
            convergence_tol=float(os.getenv("QUADLAB_CONVERGENCE_TOL", "1e-10")),
            verify_tol=float(os.getenv("QUADLAB_VERIFY_TOL", "1e-9")),
            max_iter=int(os.getenv("QUADLAB_MAX_ITER", "100")),
            max_triples=int(os.getenv("QUADLAB_MAX_TRIPLES", "4096")),
            output_format=os.getenv("QUADLAB_OUTPUT_FORMAT", "jsonl"),
        )

    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None
