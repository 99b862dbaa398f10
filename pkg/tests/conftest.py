from pathlib import Path

import pytest

from quadlab.services.fixpoint import GridSpec
from quadlab.services.settings import reset_settings

REPO_ROOT = Path(__file__).resolve().parent.parent
EXPERIMENTS = REPO_ROOT / "config" / "experiments"

QUADLAB_VARS = [
    "QUADLAB_LOG_LEVEL",
    "QUADLAB_CONVERGENCE_TOL",
    "QUADLAB_VERIFY_TOL",
    "QUADLAB_MAX_ITER",
    "QUADLAB_MAX_TRIPLES",
    "QUADLAB_OUTPUT_FORMAT",
]


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from default settings, whatever the shell exports."""
    for var in QUADLAB_VARS:
        monkeypatch.delenv(var, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def dyadic_grid():
    return GridSpec.dyadic(scale=1.0, m_min=-3, m_max=3)


@pytest.fixture
def experiments_dir():
    return EXPERIMENTS


@pytest.fixture
def repo_root():
    return REPO_ROOT
