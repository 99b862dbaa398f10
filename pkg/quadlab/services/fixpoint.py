"""
Fixed point alternative on ψ-weighted function tables.

T g(x) = 2^(-2j) g(2^j x). Iterates of T are never resampled: the n-th
iterate is evaluated straight from the base function as
2^(-2nj) f(2^(nj) x), and both scalings are exact powers of two.
"""

import functools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from quadlab.services.error_handler import ContractionError, GridClosureError, NonConvergence, ValidationFailure
from quadlab.services.settings import get_settings

logger = logging.getLogger("quadlab.engine")

Evaluable = Callable


class GridSpec(BaseModel):
    """Finite nonzero sample coordinates standing in for "every x"."""

    model_config = ConfigDict(frozen=True)

    points: Tuple[float, ...]
    includes_origin: bool = False

    @field_validator("points")
    @classmethod
    def _check_points(cls, points):
        if len(points) < 8:
            raise ValueError(f"a grid needs at least 8 points (got {len(points)})")
        if any(p == 0.0 for p in points):
            raise ValueError("grid points must be nonzero; the origin is handled separately")
        if any(not math.isfinite(p) for p in points):
            raise ValueError("grid points must be finite")
        if any(a >= b for a, b in zip(points, points[1:])):
            raise ValueError("grid points must be distinct and sorted ascending")
        if not (points[0] < 0 < points[-1]):
            raise ValueError("grid points must span both signs")
        return points

    @classmethod
    def dyadic(cls, scale: float = 1.0, m_min: int = -3, m_max: int = 3) -> "GridSpec":
        """{± scale·2^m : m_min <= m <= m_max}."""
        if scale <= 0 or not math.isfinite(scale):
            raise ValidationFailure(f"grid scale must be a positive number (got {scale})")
        if m_max < m_min:
            raise ValidationFailure(f"grid needs m_min <= m_max (got {m_min} > {m_max})")
        positive = [math.ldexp(scale, m) for m in range(m_min, m_max + 1)]
        points = sorted([-v for v in positive] + positive)
        try:
            return cls(points=tuple(points))
        except ValueError as e:
            raise ValidationFailure(f"invalid dyadic grid: {e}") from None

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.float64)

    def closed_subgrid(self, j: int) -> np.ndarray:
        """Points x of the grid with 2^j·x also on the grid."""
        xs = self.array()
        kept = xs[np.isin(np.ldexp(xs, j), xs)]
        if kept.size == 0:
            raise GridClosureError(f"no grid point stays on the grid under multiplication by 2^{j}")
        return kept


@functools.total_ordering
@dataclass(frozen=True)
class GenMetricValue:
    """A nonnegative real or ∞."""

    value: float = 0.0
    infinite: bool = False

    @classmethod
    def finite(cls, value: float) -> "GenMetricValue":
        value = float(value)
        if math.isnan(value) or value < 0:
            raise ValueError(f"generalized metric values are nonnegative (got {value})")
        if math.isinf(value):
            return cls.infinity()
        return cls(value=value)

    @classmethod
    def infinity(cls) -> "GenMetricValue":
        return cls(value=0.0, infinite=True)

    @property
    def is_finite(self) -> bool:
        return not self.infinite

    def __float__(self) -> float:
        return math.inf if self.infinite else self.value

    def __eq__(self, other) -> bool:
        if isinstance(other, GenMetricValue):
            return float(self) == float(other)
        if isinstance(other, (int, float)):
            return float(self) == float(other)
        return NotImplemented

    def __lt__(self, other) -> bool:
        if isinstance(other, (GenMetricValue, int, float)):
            return float(self) < float(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(float(self))

    def __add__(self, other: "GenMetricValue") -> "GenMetricValue":
        if self.infinite or other.infinite:
            return GenMetricValue.infinity()
        return GenMetricValue.finite(self.value + other.value)

    def scale(self, factor: float) -> "GenMetricValue":
        """factor·d for factor > 0; ∞ stays ∞."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        if self.infinite:
            return self
        return GenMetricValue.finite(self.value * factor)

    def to_json(self) -> Union[float, str]:
        return "inf" if self.infinite else self.value

    @classmethod
    def from_json(cls, raw) -> "GenMetricValue":
        if raw in ("inf", "Infinity", math.inf):
            return cls.infinity()
        return cls.finite(raw)

    def __repr__(self) -> str:
        return "GenMetricValue(∞)" if self.infinite else f"GenMetricValue({self.value!r})"


@dataclass(frozen=True)
class IterationState:
    """The n-th iterate of T started from `base`, evaluated lazily."""

    base: Evaluable
    j: int
    n: int = 0

    def __post_init__(self):
        if self.j not in (1, -1):
            raise ValidationFailure(f"branch j must be +1 or -1 (got {self.j})")
        if self.n < 0:
            raise ValidationFailure("iteration count must be nonnegative")

    def __call__(self, x):
        if self.n == 0:
            return self.base(x)
        shift = self.n * self.j
        arr = np.asarray(x, dtype=np.float64)
        out = np.ldexp(np.asarray(self.base(np.ldexp(arr, shift)), dtype=np.float64), -2 * shift)
        return float(out) if np.ndim(x) == 0 else out

    def table(self, grid: GridSpec) -> np.ndarray:
        return np.asarray(self(grid.array()), dtype=np.float64)


def apply_T(state: IterationState) -> IterationState:
    return replace(state, n=state.n + 1)


def _points(grid) -> np.ndarray:
    if isinstance(grid, GridSpec):
        return grid.array()
    return np.asarray(grid, dtype=np.float64)


def _weights(psi: Evaluable, xs: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(psi(xs), dtype=np.float64), xs.shape)


def gen_metric(g: Evaluable, h: Evaluable, psi: Evaluable, grid) -> GenMetricValue:
    """sup over the grid of |g(x) - h(x)| / ψ(x).

    A point with ψ(x) = 0 and g(x) ≠ h(x) makes the distance ∞.
    """
    xs = _points(grid)
    diff = np.abs(np.asarray(g(xs), dtype=np.float64) - np.asarray(h(xs), dtype=np.float64))
    weights = _weights(psi, xs)
    if np.any(weights < 0):
        raise ValidationFailure("ψ must be nonnegative on the grid")
    if np.any(np.isnan(diff)) or np.any((weights == 0) & (diff > 0)):
        return GenMetricValue.infinity()
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(weights > 0, diff / np.where(weights > 0, weights, 1.0), 0.0)
    return GenMetricValue.finite(float(np.max(ratios)) if ratios.size else 0.0)


def _check_L(L: float) -> float:
    if not (0 < L < 1):
        raise ContractionError(f"Lipschitz constant must lie in (0, 1) (got {L})")
    return float(L)


@dataclass(frozen=True)
class ContractionVerdict:
    d_Tf_Tg: GenMetricValue
    d_f_g: GenMetricValue
    L: float
    holds: bool


def contraction_check(
    f: Evaluable,
    g: Evaluable,
    j: int,
    psi: Evaluable,
    L: float,
    grid: GridSpec,
    tol: Optional[float] = None,
) -> ContractionVerdict:
    """Compare d(Tf, Tg) on the 2^j-closed subgrid with L·d(f, g) on the grid."""
    L = _check_L(L)
    tol = get_settings().verify_tol if tol is None else tol
    closed = grid.closed_subgrid(j)
    lhs = gen_metric(apply_T(IterationState(f, j)), apply_T(IterationState(g, j)), psi, closed)
    rhs = gen_metric(f, g, psi, grid)
    holds = rhs.infinite or (lhs.is_finite and lhs.value <= L * rhs.value + tol)
    return ContractionVerdict(d_Tf_Tg=lhs, d_f_g=rhs, L=L, holds=holds)


@dataclass(frozen=True)
class FixedPointDiagnostics:
    distances: List[GenMetricValue]
    n_converged: Optional[int]
    L_used: float
    n0: Optional[int] = None
    infinite_branch: bool = False

    @property
    def converged(self) -> bool:
        return self.n_converged is not None

    def finite_distances(self) -> List[float]:
        return [d.value for d in self.distances if d.is_finite]


@dataclass(frozen=True)
class FixedPointResult:
    grid: GridSpec
    terminal: IterationState
    diagnostics: FixedPointDiagnostics
    table: np.ndarray = field(repr=False)

    @property
    def Q(self) -> IterationState:
        return self.terminal


def iterate_to_fixed_point(
    f: Evaluable,
    j: int,
    psi: Evaluable,
    L: float,
    grid: GridSpec,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> FixedPointResult:
    """Picard iteration of T from f until d(T^n f, T^(n+1) f) <= tol.

    Q is T^(n+1) f for the first such n. Hitting max_iter raises
    NonConvergence carrying the distances seen so far.
    """
    settings = get_settings()
    tol = settings.convergence_tol if tol is None else tol
    max_iter = settings.max_iter if max_iter is None else max_iter
    L = _check_L(L)
    if tol <= 0:
        raise ValidationFailure(f"convergence tolerance must be positive (got {tol})")
    if max_iter < 1:
        raise ValidationFailure(f"max_iter must be at least 1 (got {max_iter})")

    state = IterationState(f, j)
    distances: List[GenMetricValue] = []
    n0 = None
    for n in range(max_iter):
        following = apply_T(state)
        d = gen_metric(state, following, psi, grid)
        distances.append(d)
        logger.debug(f"iteration {n}: d(T^n f, T^(n+1) f) = {float(d):.6g}")
        if d.is_finite and n0 is None:
            n0 = n
        if d.is_finite and d.value <= tol:
            diagnostics = FixedPointDiagnostics(distances, n_converged=n, L_used=L, n0=n0)
            logger.info(f"fixed point reached after {n} iterations (j={j}, L={L:g})")
            return FixedPointResult(grid=grid, terminal=following, diagnostics=diagnostics, table=following.table(grid))
        state = following

    diagnostics = FixedPointDiagnostics(
        distances, n_converged=None, L_used=L, n0=n0, infinite_branch=n0 is None
    )
    last = float(distances[-1])
    raise NonConvergence(
        f"no fixed point within {max_iter} iterations (last distance {last:.6g}, tol {tol:g})",
        diagnostics,
    )


def a_priori_bound(d_f_Tf: GenMetricValue, L: float) -> GenMetricValue:
    """d(f, Q) <= d(f, Tf) / (1 - L)."""
    L = _check_L(L)
    return d_f_Tf.scale(1.0 / (1.0 - L))
