"""
Catalog of the identities chaining the quadratic equation to the
c-parametrized one, checked exactly for the general solution f(x) = a*x^2.

Every identity is data: parameter names, a constraint, and a builder that
returns the weighted affine arguments of both sides.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from quadlab.services.error_handler import IdentityParameterError
from quadlab.services.exact import Poly1
from quadlab.services.funceq import WeightedEquation, terms

logger = logging.getLogger("quadlab.engine")

Params = Dict[str, int]


def _nonzero(*values: int) -> bool:
    return all(v != 0 for v in values)


def _not_unit(v: int) -> bool:
    return v not in (0, 1, -1)


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    params: Tuple[str, ...]
    constraint: Callable[..., bool]
    constraint_text: str
    build: Callable[..., WeightedEquation]
    summary: str


def _eq(lhs, rhs) -> WeightedEquation:
    return WeightedEquation(lhs=terms(*lhs), rhs=terms(*rhs))


def _sum_over_pm(m: int, weight: int):
    # weight * [f(x+mz) + f(x-mz) + f(y+mz) + f(y-mz)]
    return [(weight, (1, 0, m)), (weight, (1, 0, -m)), (weight, (0, 1, m)), (weight, (0, 1, -m))]


def _unit_pm_identity(m: int) -> WeightedEquation:
    return _eq(
        _sum_over_pm(m, 1),
        _sum_over_pm(1, m**2) + [(2 * (1 - m**2), (1, 0, 0)), (2 * (1 - m**2), (0, 1, 0))],
    )


def _ab_constraint(a, b):
    return _nonzero(a, b) and a != b and a != -b


CATALOG: Dict[str, CatalogEntry] = {
    entry.label: entry
    for entry in [
        CatalogEntry(
            "2.1", (), lambda: True, "none",
            lambda: _eq([(1, (2, 1, 0)), (1, (2, -1, 0))], [(8, (1, 0, 0)), (2, (0, 1, 0))]),
            "f(2x+y)+f(2x-y) = 8f(x)+2f(y)",
        ),
        CatalogEntry(
            "2.2", (), lambda: True, "none",
            lambda: _eq(
                [(1, (2, 1, 0)), (1, (2, -1, 0))],
                [(1, (1, 1, 0)), (1, (1, -1, 0)), (6, (1, 0, 0))],
            ),
            "f(2x+y)+f(2x-y) = f(x+y)+f(x-y)+6f(x)",
        ),
        CatalogEntry(
            "2.3", (), lambda: True, "none",
            lambda: _eq(
                [(1, (3, 1, 0)), (1, (3, -1, 0))],
                [(1, (1, 1, 0)), (1, (1, -1, 0)), (16, (1, 0, 0))],
            ),
            "f(3x+y)+f(3x-y) = f(x+y)+f(x-y)+16f(x)",
        ),
        CatalogEntry(
            "2.4", ("a",), _not_unit, "a ≠ 0, ±1",
            lambda a: _eq(
                [(1, (a, 1, 0)), (1, (a, -1, 0))],
                [(1, (1, 1, 0)), (1, (1, -1, 0)), (2 * (a * a - 1), (1, 0, 0))],
            ),
            "f(ax+y)+f(ax-y) = f(x+y)+f(x-y)+2(a²-1)f(x)",
        ),
        CatalogEntry(
            "2.6", ("b",), _not_unit, "b ≠ 0, ±1",
            lambda b: _eq(
                [(1, (1, b, 0)), (1, (1, -b, 0))],
                [(b * b, (1, 1, 0)), (b * b, (1, -1, 0)), (2 * (1 - b * b), (1, 0, 0))],
            ),
            "f(x+by)+f(x-by) = b²f(x+y)+b²f(x-y)+2(1-b²)f(x)",
        ),
        CatalogEntry(
            "2.7", ("a", "b"), lambda a, b: _not_unit(a) and b != 0, "a ≠ 0, ±1; b ≠ 0",
            lambda a, b: _eq(
                [(1, (a, b, 0)), (1, (a, -b, 0))],
                [(1, (1, b, 0)), (1, (1, -b, 0)), (2 * (a * a - 1), (1, 0, 0))],
            ),
            "f(ax+by)+f(ax-by) = f(x+by)+f(x-by)+2(a²-1)f(x)",
        ),
        CatalogEntry(
            "2.8", ("a", "b"), _ab_constraint, "a, b ≠ 0, a ≠ ±b",
            lambda a, b: _eq(
                [(1, (a, b, 0)), (1, (a, -b, 0))],
                [(b * b, (1, 1, 0)), (b * b, (1, -1, 0)), (2 * (a * a - b * b), (1, 0, 0))],
            ),
            "f(ax+by)+f(ax-by) = b²f(x+y)+b²f(x-y)+2(a²-b²)f(x)",
        ),
        CatalogEntry(
            "2.9", ("a", "b"), _ab_constraint, "a, b ≠ 0, a ≠ ±b",
            lambda a, b: _eq(
                [(1, (a + b, a - b, 0)), (1, (a - b, a + b, 0))],
                [(4 * b * b, (1, 0, 0)), (4 * b * b, (0, 1, 0)), (2 * (a * a - b * b), (1, 1, 0))],
            ),
            "f((a+b)x+(a-b)y)+f((a-b)x+(a+b)y) = 4b²(f(x)+f(y))+2(a²-b²)f(x+y)",
        ),
        CatalogEntry(
            "2.18", ("a",), _not_unit, "a ≠ 0, ±1",
            lambda a: _unit_pm_identity(a * a),
            "Σ f(x±a²z)+f(y±a²z) = a⁴ Σ f(x±z)+f(y±z) + 2(1-a⁴)(f(x)+f(y))",
        ),
        CatalogEntry(
            "2.19", ("a", "b"), _ab_constraint, "a, b ≠ 0, a ≠ ±b",
            lambda a, b: _unit_pm_identity(a * b),
            "Σ f(x±abz)+f(y±abz) = a²b² Σ f(x±z)+f(y±z) + 2(1-a²b²)(f(x)+f(y))",
        ),
        CatalogEntry(
            "2.20", ("a", "b"), lambda a, b: _ab_constraint(a, b) and _not_unit(a), "a, b ≠ 0, a ≠ ±1, a ≠ ±b",
            lambda a, b: _eq(
                [(1, (1, 1, 2 * a * b)), (1, (1, 1, -2 * a * b))],
                [(2, (1, 1, 0))]
                + _sum_over_pm(1, 2 * a * a * b * b)
                + [(-4 * a * a * b * b, (1, 0, 0)), (-4 * a * a * b * b, (0, 1, 0))],
            ),
            "f(x+y+2abz)+f(x+y-2abz) = 2f(x+y)+2a²b² Σ f(x±z)+f(y±z) - 4a²b²(f(x)+f(y))",
        ),
        CatalogEntry(
            "2.21", ("c",), _not_unit, "c ≠ 0, ±1",
            lambda c: _eq([(c * c, (0, 0, c + 1)), (c * c, (0, 0, c - 1))], [(2 * (c * c + 1), (0, 0, c))]),
            "c²[f((c+1)z)+f((c-1)z)] = 2(c²+1)f(cz)",
        ),
        CatalogEntry(
            "2.22", ("c",), _not_unit, "c ≠ 0, ±1",
            lambda c: _eq([(c * c, (0, 0, c + 2)), (c * c, (0, 0, c - 2))], [(2 * (c * c + 4), (0, 0, c))]),
            "c²[f((c+2)z)+f((c-2)z)] = 2(c²+4)f(cz)",
        ),
        CatalogEntry(
            "2.23", ("c", "k"), lambda c, k: _not_unit(c) and k != 0, "c ≠ 0, ±1; k ≠ 0",
            lambda c, k: _eq(
                [(c * c, (0, 0, c + k)), (c * c, (0, 0, c - k))], [(2 * (c * c + k * k), (0, 0, c))]
            ),
            "c²[f((c+k)z)+f((c-k)z)] = 2(c²+k²)f(cz)",
        ),
        CatalogEntry(
            "2.24", ("c",), _not_unit, "c ≠ 0, ±1",
            lambda c: _eq(
                [(1, (1, 0, 2 * c)), (1, (1, 0, -2 * c))],
                [
                    (2 * c * c, (1, 0, 1)),
                    (2 * c * c, (1, 0, -1)),
                    (4 * c * c, (0, 0, 1)),
                    (2 * (1 - 2 * c * c), (1, 0, 0)),
                ],
            ),
            "f(x+2cz)+f(x-2cz) = 2c²f(x+z)+2c²f(x-z)+4c²f(z)+2(1-2c²)f(x)",
        ),
        CatalogEntry(
            "2.25", ("c",), _not_unit, "c ≠ 0, ±1",
            lambda c: _eq(
                [(1, (2 * c, 0, 1)), (1, (2 * c, 0, -1))],
                [(2, (1, 0, 1)), (2, (1, 0, -1)), (-4 * (1 - 2 * c * c), (1, 0, 0)), (-2, (0, 0, 1))],
            ),
            "f(2cx+z)+f(2cx-z) = 2f(x+z)+2f(x-z)-4(1-2c²)f(x)-2f(z)",
        ),
        CatalogEntry(
            "2.27", ("c",), _not_unit, "c ≠ 0, ±1",
            lambda c: _eq(
                [(1, (2 * c, 0, 1)), (1, (2 * c, 0, -1))],
                [
                    (2 * c * c, (1, 0, 1)),
                    (2 * c * c, (1, 0, -1)),
                    (4 * c * c, (1, 0, 0)),
                    (2 * (1 - 2 * c * c), (0, 0, 1)),
                ],
            ),
            "f(2cx+z)+f(2cx-z) = 2c²f(x+z)+2c²f(x-z)+4c²f(x)+2(1-2c²)f(z)",
        ),
        CatalogEntry(
            "2.28", ("c",), _not_unit, "c ≠ 0, ±1",
            lambda c: _eq(
                [(2 * c * c - 2, (1, 0, 1)), (2 * c * c - 2, (1, 0, -1))],
                [(4 * c * c - 4, (1, 0, 0)), (4 * c * c - 4, (0, 0, 1))],
            ),
            "(2c²-2)f(x+z)+(2c²-2)f(x-z) = (4c²-4)f(x)+(4c²-4)f(z)",
        ),
        CatalogEntry(
            "even", (), lambda: True, "none",
            lambda: _eq([(1, (-1, 0, 0))], [(1, (1, 0, 0))]),
            "f(-x) = f(x)",
        ),
        CatalogEntry(
            "homog", ("k",), lambda k: k != 0, "k ≠ 0",
            lambda k: _eq([(1, (k, 0, 0))], [(k * k, (1, 0, 0))]),
            "f(kx) = k²f(x)",
        ),
        CatalogEntry(
            "double", ("c",), _not_unit, "c ≠ 0, ±1",
            lambda c: _eq([(1, (0, 0, 2 * c))], [(4 * c * c, (0, 0, 1))]),
            "f(2cz) = 4c²f(z)",
        ),
    ]
}


def _validate(label: str, params: Params) -> Params:
    entry = CATALOG.get(label)
    if entry is None:
        raise IdentityParameterError(f"unknown identity {label!r}; known: {', '.join(CATALOG)}")
    missing = [name for name in entry.params if params.get(name) is None]
    if missing:
        raise IdentityParameterError(f"identity {label} needs parameter(s) {', '.join(missing)}")
    values = {name: int(params[name]) for name in entry.params}
    if not entry.constraint(*values.values()):
        shown = ", ".join(f"{k}={v}" for k, v in values.items())
        raise IdentityParameterError(f"identity {label} requires {entry.constraint_text} (got {shown})")
    return values


class IdentityId(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    params: Dict[str, int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self):
        _validate(self.label, self.params)
        return self

    @classmethod
    def of(cls, label: str, **params: Optional[int]) -> "IdentityId":
        values = _validate(label, params)
        return cls(label=label, params=values)

    @property
    def entry(self) -> CatalogEntry:
        return CATALOG[self.label]

    def equation(self) -> WeightedEquation:
        return self.entry.build(*(self.params[name] for name in self.entry.params))


class IdentityVerdict(BaseModel):
    id: str
    params: Dict[str, int]
    verdict: str
    difference: str
    scalars_checked: List[str]
    statement: str

    @property
    def holds(self) -> bool:
        return self.verdict == "pass"


def _random_scalars(seed: int, count: int) -> List[Fraction]:
    rng = np.random.default_rng(seed)
    nums = rng.integers(-50, 51, size=count)
    dens = rng.integers(1, 20, size=count)
    return [Fraction(int(n), int(d)) for n, d in zip(nums, dens)]


def verify_identity(identity: IdentityId, seed: int = 0, scalars: int = 5) -> IdentityVerdict:
    """Substitute f(x) = a*x^2 into both sides and expand exactly.

    The x^2 difference is the reported polynomial; the same check is repeated
    for a few random rational a.
    """
    equation = identity.equation()
    difference = equation.expand(Poly1.monomial(2))
    checked = _random_scalars(seed, scalars)
    holds = difference.is_zero() and all(equation.expand(Poly1.monomial(2, a)).is_zero() for a in checked)
    if not holds:
        logger.warning(f"identity {identity.label} {identity.params} fails: difference {difference}")
    return IdentityVerdict(
        id=identity.label,
        params=dict(identity.params),
        verdict="pass" if holds else "fail",
        difference=str(difference),
        scalars_checked=[str(a) for a in checked],
        statement=identity.entry.summary,
    )


class LemmaSweep(BaseModel):
    """Parameter values the catalog is swept over."""

    a_values: List[int] = Field(default_factory=lambda: [2, -2, 3, -3, 5, -5])
    b_values: List[int] = Field(default_factory=lambda: [2, -2, 3, -3, 5, -5])
    c_values: List[int] = Field(default_factory=lambda: [2, -2, 3, -3])
    k_values: List[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5, 6])
    include_k_3c: bool = True

    def _k_for(self, c: int) -> List[int]:
        ks = list(self.k_values)
        if self.include_k_3c and 3 * c not in ks:
            ks.append(3 * c)
        return ks

    def identities(self, labels: Optional[List[str]] = None) -> Iterator[IdentityId]:
        """Every admissible (identity, parameters) pair, in catalog order."""
        for label, entry in CATALOG.items():
            if labels and label not in labels:
                continue
            for values in self._grid(entry):
                params = dict(zip(entry.params, values))
                if entry.constraint(*values):
                    yield IdentityId(label=label, params=params)

    def _grid(self, entry: CatalogEntry):
        if entry.params == ("c", "k"):
            for c in self.c_values:
                for k in self._k_for(c):
                    yield (c, k)
            return
        values = {"a": self.a_values, "b": self.b_values, "c": self.c_values, "k": self.k_values}
        yield from itertools.product(*(values[name] for name in entry.params))
