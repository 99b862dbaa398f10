"""
Experiment and sweep files (YAML).

Keys may be nested mappings or flat dotted keys (`grid.scale: 0.5`); both are
normalized to nested mappings before validation.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, Field

from quadlab.services.error_handler import ValidationFailure
from quadlab.services.expr_parser import parse_function
from quadlab.services.fixpoint import GridSpec
from quadlab.services.functions import QuadPlusNoise, QuadPlusPower, TableFunction
from quadlab.services.lemmas import LemmaSweep
from quadlab.services.stability import Constant, PowerType, StabilityConfig

logger = logging.getLogger("quadlab.cli")


def load_config(config_path: Union[str, Path]) -> Dict[str, Any]:
    """Load a YAML file into a mapping."""
    path = Path(config_path)
    if not path.exists():
        raise ValidationFailure(f"config file not found: {path}")
    with path.open("r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ValidationFailure(f"{path}: invalid YAML: {e}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValidationFailure(f"{path}: top level must be a mapping")
    return data


def nest_dotted(raw: Dict[str, Any]) -> Dict[str, Any]:
    """{'grid.scale': 1, 'grid': {'m_min': -3}} -> {'grid': {'scale': 1, 'm_min': -3}}."""
    nested: Dict[str, Any] = {}
    for key, value in raw.items():
        parts = str(key).split(".")
        node = nested
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ValidationFailure(f"key {key!r} conflicts with a scalar value at {part!r}")
            node = child
        leaf = parts[-1]
        if isinstance(value, dict) and isinstance(node.get(leaf), dict):
            node[leaf].update(nest_dotted(value))
        elif isinstance(value, dict) and leaf not in ("points",):
            node[leaf] = nest_dotted(value)
        else:
            node[leaf] = value
    return nested


class GridSection(BaseModel):
    scale: float = 1.0
    m_min: int = -3
    m_max: int = 3

    def build(self) -> GridSpec:
        return GridSpec.dyadic(self.scale, self.m_min, self.m_max)


class OutputSection(BaseModel):
    format: Optional[Literal["jsonl", "csv"]] = None
    path: Optional[str] = None


class ExperimentFile(BaseModel):
    name: Optional[str] = None
    c: int
    function: Dict[str, Any]
    control: Dict[str, Any]
    branch: Union[Literal["auto"], int, str] = "auto"
    grid: GridSection = Field(default_factory=GridSection)
    tol: Optional[float] = None
    max_iter: Optional[int] = None
    seed: int = 0
    output: OutputSection = Field(default_factory=OutputSection)


def _branch(value) -> Union[str, int]:
    text = str(value).strip()
    if text == "auto":
        return "auto"
    if text in ("1", "+1"):
        return 1
    if text == "-1":
        return -1
    raise ValidationFailure(f"branch must be auto, +1 or -1 (got {value!r})")


def _function(section: Dict[str, Any]):
    kind = section.get("kind", "polynomial")
    params = section.get("params") or {}
    if kind == "polynomial":
        expr = params.get("expr", section.get("expr"))
        if expr is None:
            raise ValidationFailure("polynomial functions need function.params.expr")
        return parse_function(str(expr))
    if kind == "quadpow":
        return QuadPlusPower(**params)
    if kind == "quadnoise":
        return QuadPlusNoise(**params)
    if kind == "table":
        return TableFunction(points={float(k): float(v) for k, v in (params.get("points") or {}).items()})
    raise ValidationFailure(f"unknown function kind {kind!r}")


def _control(section: Dict[str, Any]):
    """Returns (control, source); a parameter of `fit` or `ceiling` is resolved at run time."""
    kind = section.get("kind")
    params = section.get("params") or {}
    name = {"power": "eps", "constant": "delta"}.get(kind)
    if name is None:
        raise ValidationFailure(f"control.kind must be power or constant (got {kind!r})")
    raw = params.get(name, "fit")
    source = "declared"
    if isinstance(raw, str) and raw in ("fit", "ceiling"):
        source, raw = raw, 0.0
    if kind == "power":
        return PowerType(eps=raw, p=params.get("p")), source
    return Constant(delta=raw), source


def build_experiment(raw: Dict[str, Any], name: Optional[str] = None, seed: Optional[int] = None):
    """Validate a raw experiment mapping; returns (StabilityConfig, OutputSection)."""
    spec = ExperimentFile(**nest_dotted(raw))
    control, source = _control(spec.control)
    config = StabilityConfig(
        name=spec.name or name or "experiment",
        c=spec.c,
        f=_function(spec.function),
        control=control,
        control_source=source,
        j=_branch(spec.branch),
        grid=spec.grid.build(),
        tol=spec.tol,
        max_iter=spec.max_iter,
        seed=spec.seed if seed is None else seed,
    )
    logger.debug(f"loaded experiment {config.name}: {config.f.describe()} with {control.kind} control ({source})")
    return config, spec.output


def load_experiment(path: Union[str, Path], seed: Optional[int] = None):
    return build_experiment(load_config(path), name=Path(path).stem, seed=seed)


class SweepFile(BaseModel):
    labels: Optional[List[str]] = None
    sweep: LemmaSweep = Field(default_factory=LemmaSweep)


def load_sweep(path: Union[str, Path]) -> SweepFile:
    return SweepFile(**nest_dotted(load_config(path)))
