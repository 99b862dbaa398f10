"""
Stability experiments for the c-parametrized quadratic equation.

A control φ bounds the residual Δ_f; ψ(x) = φ(x/2, 0, 0) weights the metric
the contraction T works in; the fixed point Q of T is the quadratic near f,
and |f(x) - Q(x)| is certified against L^((j+1)/2) / (c²(1-L)) · ψ(x).
"""

import logging
import math
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from quadlab.services.error_handler import BoundMismatch, ContractionError, HypothesisFailure, ValidationFailure
from quadlab.services.fixpoint import (
    GenMetricValue,
    GridSpec,
    IterationState,
    a_priori_bound,
    apply_T,
    gen_metric,
    iterate_to_fixed_point,
)
from quadlab.services.funceq import check_c, closed_triples, residual_main
from quadlab.services.functions import FunctionExpr, QuadPlusNoise, TableFunction
from quadlab.services.settings import get_settings

logger = logging.getLogger("quadlab.engine")

DEFAULT_GRID = GridSpec.dyadic(scale=1.0, m_min=-3, m_max=3)


class PowerType(BaseModel):
    """φ(x, y, z) = ε(|x|^p + |y|^p + |z|^p), with |x|^0 = 1 everywhere."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["power"] = "power"
    eps: float = Field(0.0, ge=0)
    p: float = Field(ge=0)

    @field_validator("p")
    @classmethod
    def _p_not_two(cls, p):
        if p == 2:
            raise ValueError("power-type control needs p ≠ 2")
        return p

    @property
    def parameter(self) -> float:
        return self.eps

    def with_parameter(self, value: float) -> "PowerType":
        return PowerType(eps=value, p=self.p)

    def unit(self, x, y, z):
        px = lambda t: np.abs(np.asarray(t, dtype=np.float64)) ** self.p
        return px(x) + px(y) + px(z)

    def __call__(self, x, y, z):
        return self.eps * self.unit(x, y, z)

    def describe(self) -> str:
        return f"power(eps={self.eps!r}, p={self.p!r})"


class Constant(BaseModel):
    """φ ≡ δ."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["constant"] = "constant"
    delta: float = Field(0.0, ge=0)

    @property
    def parameter(self) -> float:
        return self.delta

    def with_parameter(self, value: float) -> "Constant":
        return Constant(delta=value)

    def as_power(self) -> PowerType:
        """The p = 0 power-type control with ε = δ/3."""
        return PowerType(eps=self.delta / 3, p=0)

    def unit(self, x, y, z):
        return np.ones(np.broadcast(np.asarray(x), np.asarray(y), np.asarray(z)).shape)

    def __call__(self, x, y, z):
        return self.delta * self.unit(x, y, z)

    def describe(self) -> str:
        return f"constant(delta={self.delta!r})"


ControlFunction = Annotated[Union[PowerType, Constant], Field(discriminator="kind")]


class PowerWeight(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float
    p: float

    def __call__(self, x):
        arr = np.asarray(x, dtype=np.float64)
        out = self.eps * np.abs(arr) ** self.p / 2.0**self.p
        return float(out) if np.ndim(x) == 0 else out


class ConstantWeight(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float

    def __call__(self, x):
        if np.ndim(x) == 0:
            return float(self.delta)
        return np.full(np.shape(x), self.delta, dtype=np.float64)


def psi_from_phi(control) -> Union[PowerWeight, ConstantWeight]:
    """ψ(x) = φ(x/2, 0, 0) for power controls (zero coordinates drop out), ψ ≡ δ for constants."""
    if isinstance(control, Constant):
        return ConstantWeight(delta=control.delta)
    return PowerWeight(eps=control.eps, p=control.p)


def resolve_branch(control, j: Union[str, int] = "auto") -> int:
    """j = +1 when p < 2, -1 when p > 2; constants only admit j = +1."""
    if isinstance(control, Constant):
        if j not in ("auto", 1):
            raise ContractionError("a constant control only admits the branch j = +1")
        return 1
    expected = 1 if control.p < 2 else -1
    if j == "auto":
        return expected
    if j not in (1, -1):
        raise ValidationFailure(f"branch must be auto, +1 or -1 (got {j!r})")
    if j != expected:
        raise ContractionError(f"branch j={j:+d} with p={control.p} gives (p-2)j >= 0, so L >= 1")
    return j


def lipschitz_for_power(p: float, j: int) -> float:
    """L = 2^((p-2)j), the constant with 2^(-2j) ψ(2^j x) = L ψ(x)."""
    if (p - 2) * j >= 0:
        raise ContractionError(f"(p-2)j must be negative for a contraction (p={p}, j={j})")
    return 2.0 ** ((p - 2) * j)


def printed_lipschitz(p: float, j: int) -> float:
    return 2.0 ** ((p - 3) * j)


def lipschitz_for(control, j: int) -> float:
    if isinstance(control, Constant):
        return 0.25
    return lipschitz_for_power(control.p, j)


def bound_from_theorem(psi_x, c: int, j: int, L: float):
    """L^((j+1)/2) / (c²(1-L)) · ψ(x); ∞ when L >= 1."""
    if L <= 0:
        raise ContractionError(f"Lipschitz constant must be positive (got {L})")
    psi_x = np.asarray(psi_x, dtype=np.float64)
    if L >= 1:
        out = np.full(psi_x.shape, math.inf)
    else:
        out = L ** ((j + 1) / 2) / (c * c * (1 - L)) * psi_x
    return float(out) if out.ndim == 0 else out


def bound_closed_form(control, c: int, j: int, x):
    """jε|x|^p / (c²(4 - 2^p)); δ/(9c²) for a constant control."""
    if isinstance(control, Constant):
        control = control.as_power()
    arr = np.asarray(x, dtype=np.float64)
    out = j * control.eps * np.abs(arr) ** control.p / (c * c * (4 - 2.0**control.p))
    return float(out) if out.ndim == 0 else out


def theoretical_bound(control, c: int, j: int, x):
    """Bound on |f(x) - Q(x)|, computed both ways and cross-checked."""
    c = check_c(c)
    instance = control.as_power() if isinstance(control, Constant) else control
    L = lipschitz_for_power(instance.p, j)
    general = bound_from_theorem(psi_from_phi(instance)(x), c, j, L)
    closed = bound_closed_form(instance, c, j, x)
    if not np.allclose(general, closed, rtol=1e-12, atol=0.0):
        raise BoundMismatch(f"bound formulas disagree for {control.describe()} at c={c}, j={j}: {general} vs {closed}")
    return general


def noise_delta_ceiling(eta: float, c: int) -> float:
    """Bound on |Δ_f| for f = a·x² + u with |u| <= η: fourteen weighted evaluations."""
    return eta * (4 + 10 * c * c)


def sample_triples(grid: GridSpec, max_triples: Optional[int] = None, seed: int = 0) -> np.ndarray:
    """Triples over grid ∪ {0} without the all-zero triple.

    The axis triples (x, 0, 0) and (x/2, 0, 0) are always included; the rest
    is capped at max_triples by seeded stratified selection.
    """
    max_triples = get_settings().max_triples if max_triples is None else max_triples
    coords = np.concatenate([[0.0], grid.array()])
    mesh = np.stack(np.meshgrid(coords, coords, coords, indexing="ij"), axis=-1).reshape(-1, 3)
    mesh = mesh[np.any(mesh != 0.0, axis=1)]
    if len(mesh) > max_triples:
        rng = np.random.default_rng(seed)
        edges = np.linspace(0, len(mesh), max_triples + 1).astype(np.int64)
        picks = edges[:-1] + (rng.random(max_triples) * (edges[1:] - edges[:-1])).astype(np.int64)
        mesh = mesh[picks]
    xs = grid.array()
    zeros = np.zeros_like(xs)
    axis = np.concatenate([np.stack([xs, zeros, zeros], axis=1), np.stack([xs / 2, zeros, zeros], axis=1)])
    return np.concatenate([axis, mesh])


def _triples_for(f, c: int, grid: GridSpec, max_triples: Optional[int], seed: int) -> np.ndarray:
    if isinstance(f, TableFunction):
        return closed_triples(f, c)
    return sample_triples(grid, max_triples, seed)


def _residuals(f, c: int, triples: np.ndarray) -> np.ndarray:
    if len(triples) == 0:
        return np.zeros(0)
    return np.abs(np.asarray(residual_main(f, c, triples[:, 0], triples[:, 1], triples[:, 2]), dtype=np.float64))


def empirical_control_fit(
    f,
    c: int,
    family,
    grid: GridSpec,
    max_triples: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Smallest parameter of `family` for which |Δ_f| <= φ on the sampled triples."""
    c = check_c(c)
    triples = _triples_for(f, c, grid, max_triples, seed)
    if len(triples) == 0:
        return 0.0
    residuals = _residuals(f, c, triples)
    unit = np.asarray(family.unit(triples[:, 0], triples[:, 1], triples[:, 2]), dtype=np.float64)
    if np.any((unit == 0) & (residuals > 0)):
        return math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(unit > 0, residuals / np.where(unit > 0, unit, 1.0), 0.0)
    fitted = float(np.max(ratios))
    logger.debug(f"fitted {family.kind} parameter {fitted!r} over {len(triples)} triples")
    return fitted


def empirical_lipschitz(distances: List[GenMetricValue]) -> Optional[float]:
    """Geometric mean of successive distance ratios over the finite positive run."""
    finite = [d.value for d in distances if d.is_finite and d.value > 0]
    if len(finite) < 2:
        return None
    k = len(finite) - 1
    return (finite[-1] / finite[0]) ** (1.0 / k)


class StabilityConfig(BaseModel):
    name: str = "experiment"
    c: int
    f: FunctionExpr
    control: ControlFunction
    control_source: Literal["declared", "fit", "ceiling"] = "declared"
    j: Literal["auto", 1, -1] = "auto"
    grid: GridSpec = DEFAULT_GRID
    tol: Optional[float] = Field(None, gt=0)
    max_iter: Optional[int] = Field(None, ge=1)
    seed: int = 0

    @field_validator("c")
    @classmethod
    def _admissible_c(cls, c):
        return check_c(c)

    @model_validator(mode="after")
    def _ceiling_needs_noise(self):
        if self.control_source == "ceiling":
            if not isinstance(self.control, Constant) or not isinstance(self.f, QuadPlusNoise):
                raise ValueError("the analytic ceiling applies to a constant control with a quadnoise function")
        return self


class PointRecord(BaseModel):
    x: float
    f: float
    Q: float
    err: float
    bound: float
    a_priori_bound: float
    passed: bool
    a_priori_passed: bool


class StabilityReport(BaseModel):
    name: str
    c: int
    function: str
    control: str
    control_source: str
    control_parameter: float
    j: int
    theoretical_L: float
    printed_L: float
    empirical_L: Optional[float]
    decay_certified: bool
    hypothesis_worst_ratio: float
    d_f_Tf: Union[float, str]
    checkpoint: float
    checkpoint_verdict: str
    max_delta_q: float
    delta_q_verdict: str
    uniqueness_gap: float
    uniqueness_verdict: str
    a_priori_verdict: str
    verdict: str
    iterations: Optional[int]
    distances: List[Union[float, str]]
    points: List[PointRecord]

    @property
    def ok(self) -> bool:
        """Per-point bounds and every auxiliary certificate pass."""
        return all(
            v == "pass" for v in (self.verdict, self.checkpoint_verdict, self.delta_q_verdict, self.uniqueness_verdict)
        )

    def to_records(self) -> List[Dict[str, Any]]:
        summary = self.model_dump(exclude={"points"})
        summary["record"] = "summary"
        rows = [summary]
        for point in self.points:
            row = point.model_dump()
            row["record"] = "point"
            rows.append(row)
        return rows

    @classmethod
    def from_records(cls, records: List[Dict[str, Any]]) -> "StabilityReport":
        summaries = [r for r in records if r.get("record") == "summary"]
        if len(summaries) != 1:
            raise ValidationFailure(f"a stability report has exactly one summary record (found {len(summaries)})")
        summary = {k: v for k, v in summaries[0].items() if k != "record"}
        points = [{k: v for k, v in r.items() if k != "record"} for r in records if r.get("record") == "point"]
        return cls(**summary, points=points)


def _verdict(flag: bool) -> str:
    return "pass" if flag else "fail"


def _slack(value: float, verify_tol: float) -> float:
    return verify_tol * max(1.0, abs(value))


def resolve_control(config: StabilityConfig):
    if config.control_source == "fit":
        fitted = empirical_control_fit(config.f, config.c, config.control, config.grid, seed=config.seed)
        return config.control.with_parameter(fitted)
    if config.control_source == "ceiling":
        return config.control.with_parameter(noise_delta_ceiling(config.f.eta, config.c))
    return config.control


def run_experiment(config: StabilityConfig) -> StabilityReport:
    """Resolve the branch, certify the hypotheses, extract Q and check every bound."""
    settings = get_settings()
    verify_tol = settings.verify_tol
    f, c, grid = config.f, config.c, config.grid
    if isinstance(f, TableFunction):
        # T evaluates f at 2^(nj) x for every n, which leaves any finite table
        raise ValidationFailure(
            f"{config.name}: experiments need a function defined off the grid; "
            "table functions only support residual checks and control fits"
        )

    control = resolve_control(config)
    j = resolve_branch(control, config.j)
    L = lipschitz_for(control, j)
    p = 0.0 if isinstance(control, Constant) else control.p
    logger.info(f"{config.name}: c={c}, {control.describe()}, j={j:+d}, L={L:g}")

    triples = _triples_for(f, c, grid, None, config.seed)
    residuals = _residuals(f, c, triples)
    phi = np.asarray(control(triples[:, 0], triples[:, 1], triples[:, 2]), dtype=np.float64) if len(triples) else np.zeros(0)
    excess = residuals - phi - verify_tol * np.maximum(1.0, phi)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(phi > 0, residuals / np.where(phi > 0, phi, 1.0), np.where(residuals > 0, np.inf, 0.0))
    worst = float(np.max(ratios)) if ratios.size else 0.0
    if ratios.size and np.any(excess > 0):
        raise HypothesisFailure(
            f"{control.describe()} does not dominate |Δ_f| on {int(np.sum(excess > 0))} of {len(triples)} sampled triples",
            worst_ratio=worst,
        )

    psi = psi_from_phi(control)
    f_state = IterationState(f, j)
    d_f_Tf = gen_metric(f_state, apply_T(f_state), psi, grid)
    checkpoint = L ** ((j + 1) / 2) / (c * c)
    checkpoint_ok = d_f_Tf.is_finite and d_f_Tf.value <= checkpoint + _slack(checkpoint, verify_tol)
    if not checkpoint_ok:
        logger.warning(f"{config.name}: d(f, Tf) = {float(d_f_Tf):.6g} exceeds the checkpoint {checkpoint:.6g}")

    result = iterate_to_fixed_point(f, j, psi, L, grid, tol=config.tol, max_iter=config.max_iter)
    diagnostics = result.diagnostics
    Q = result.terminal

    xs = grid.array()
    f_values = np.asarray(f(xs), dtype=np.float64)
    errors = np.abs(f_values - result.table)
    bounds = np.asarray(theoretical_bound(control, c, j, xs), dtype=np.float64)
    a_priori_scale = float(a_priori_bound(d_f_Tf, L))
    a_priori = a_priori_scale * np.asarray(psi(xs), dtype=np.float64)
    points = []
    for x, fx, qx, err, bound, ap in zip(xs, f_values, result.table, errors, bounds, a_priori):
        points.append(
            PointRecord(
                x=float(x),
                f=float(fx),
                Q=float(qx),
                err=float(err),
                bound=float(bound),
                a_priori_bound=float(ap),
                passed=bool(err <= bound + _slack(bound, verify_tol)),
                a_priori_passed=bool(err <= ap + _slack(ap, verify_tol)),
            )
        )

    q_triples = sample_triples(grid, None, config.seed)
    max_delta_q = float(np.max(_residuals(Q, c, q_triples)))

    restarted = iterate_to_fixed_point(apply_T(f_state), j, psi, L, grid, tol=config.tol, max_iter=config.max_iter)
    gap = float(np.max(np.abs(restarted.table - result.table)))
    q_scale = float(np.max(np.abs(result.table)))

    empirical_L = empirical_lipschitz(diagnostics.distances)
    verdict = _verdict(all(point.passed for point in points))
    if verdict == "fail":
        logger.warning(f"{config.name}: bound violated at {sum(not pt.passed for pt in points)} grid points")

    return StabilityReport(
        name=config.name,
        c=c,
        function=f.describe(),
        control=control.describe(),
        control_source=config.control_source,
        control_parameter=control.parameter,
        j=j,
        theoretical_L=L,
        printed_L=printed_lipschitz(p, j),
        empirical_L=empirical_L,
        decay_certified=(p - 2) * j < 0,
        hypothesis_worst_ratio=worst,
        d_f_Tf=d_f_Tf.to_json(),
        checkpoint=checkpoint,
        checkpoint_verdict=_verdict(checkpoint_ok),
        max_delta_q=max_delta_q,
        delta_q_verdict=_verdict(max_delta_q <= 1e-7),
        uniqueness_gap=gap,
        uniqueness_verdict=_verdict(gap <= _slack(q_scale, verify_tol)),
        a_priori_verdict=_verdict(all(point.a_priori_passed for point in points)),
        verdict=verdict,
        iterations=diagnostics.n_converged,
        distances=[d.to_json() for d in diagnostics.distances],
        points=points,
    )
