"""
The quadratic equation f(x+y) + f(x-y) = 2f(x) + 2f(y) and the three-variable
quadratic-type equation parametrized by an integer c ∉ {0, ±1}:

    f(x+y+2cz) + f(x+y-2cz) + c²f(2x) + c²f(2y)
        = 2[f(x+y) + c²f(x+z) + c²f(x-z) + c²f(y+z) + c²f(y-z)]

Both are stored as weighted affine arguments, w·f(αx+βy+γz), so the same data
drives numeric residuals and exact symbolic expansion.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from quadlab.services.error_handler import EquationParameterError, ValidationFailure
from quadlab.services.exact import Poly1, Poly3, RationalMatrix, compose_affine, nullspace, poly_ring_ops
from quadlab.services.functions import TableFunction

logger = logging.getLogger("quadlab.engine")

Affine = Tuple[int, int, int]
Evaluable = Callable


@dataclass(frozen=True)
class WeightedTerm:
    weight: int
    args: Affine

    def evaluate(self, f: Evaluable, x, y, z):
        a, b, g = self.args
        return self.weight * f(a * x + b * y + g * z)

    def expand(self, p: Poly1) -> Poly3:
        return compose_affine(p, *self.args).scale(self.weight)


@dataclass(frozen=True)
class WeightedEquation:
    """lhs = rhs, each side a sum of weighted affine evaluations of f."""

    lhs: Tuple[WeightedTerm, ...]
    rhs: Tuple[WeightedTerm, ...]

    def residual(self, f: Evaluable, x, y, z):
        total = 0
        for term in self.lhs:
            total = total + term.evaluate(f, x, y, z)
        for term in self.rhs:
            total = total - term.evaluate(f, x, y, z)
        return total

    def expand(self, p: Poly1) -> Poly3:
        total = Poly3()
        for term in self.lhs:
            total = poly_ring_ops(total, term.expand(p), 1)
        for term in self.rhs:
            total = poly_ring_ops(total, term.expand(p), -1)
        return total

    def arguments(self) -> List[Affine]:
        return [t.args for t in self.lhs + self.rhs]

    @property
    def abs_weight_sum(self) -> int:
        return sum(abs(t.weight) for t in self.lhs + self.rhs)


def terms(*pairs) -> Tuple[WeightedTerm, ...]:
    return tuple(WeightedTerm(w, tuple(args)) for w, args in pairs)


def check_c(c: int) -> int:
    """Validate the equation parameter: an integer other than 0, 1, -1."""
    if isinstance(c, bool) or int(c) != c:
        raise EquationParameterError(f"c must be an integer (got {c!r})")
    c = int(c)
    if c in (0, 1, -1):
        raise EquationParameterError(f"c must satisfy c ≠ 0, ±1 (got c={c})")
    return c


def main_equation(c: int) -> WeightedEquation:
    c = check_c(c)
    c2 = c * c
    return WeightedEquation(
        lhs=terms((1, (1, 1, 2 * c)), (1, (1, 1, -2 * c)), (c2, (2, 0, 0)), (c2, (0, 2, 0))),
        rhs=terms(
            (2, (1, 1, 0)),
            (2 * c2, (1, 0, 1)),
            (2 * c2, (1, 0, -1)),
            (2 * c2, (0, 1, 1)),
            (2 * c2, (0, 1, -1)),
        ),
    )


BASE_EQUATION = WeightedEquation(
    lhs=terms((1, (1, 1, 0)), (1, (1, -1, 0))),
    rhs=terms((2, (1, 0, 0)), (2, (0, 1, 0))),
)


class EquationId(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["base", "main"]
    c: Optional[int] = None

    @model_validator(mode="after")
    def _check_parameters(self):
        if self.kind == "main":
            if self.c is None:
                raise ValueError("the main equation needs an integer c")
            check_c(self.c)
        return self

    @classmethod
    def base(cls) -> "EquationId":
        return cls(kind="base")

    @classmethod
    def main(cls, c: int) -> "EquationId":
        check_c(c)
        return cls(kind="main", c=c)

    def equation(self) -> WeightedEquation:
        return BASE_EQUATION if self.kind == "base" else main_equation(self.c)

    def label(self) -> str:
        return "base" if self.kind == "base" else f"main(c={self.c})"


def residual_main(f: Evaluable, c: int, x, y, z):
    """LHS - RHS of the c-parametrized equation at (x, y, z).

    Arrays broadcast; exact when f is a polynomial and the arguments are rational.
    """
    return main_equation(c).residual(f, x, y, z)


def residual_quadratic(f: Evaluable, x, y):
    """f(x+y) + f(x-y) - 2f(x) - 2f(y)."""
    return BASE_EQUATION.residual(f, x, y, 0)


def symbolic_residual(p: Poly1, eq: EquationId) -> Poly3:
    return eq.equation().expand(p)


def solution_space(eq: EquationId, max_degree: int) -> List[Poly1]:
    """Basis of the polynomial solutions of degree <= max_degree.

    The coefficients of p are the unknowns; every monomial of the residual
    gives one linear constraint; the basis is the exact nullspace.
    """
    if max_degree < 2:
        raise ValidationFailure(f"max degree must be at least 2 (got {max_degree})")
    equation = eq.equation()
    columns = [equation.expand(Poly1.monomial(d)) for d in range(max_degree + 1)]
    monomials = sorted({exp for col in columns for exp in col.terms})
    if monomials:
        matrix = RationalMatrix.from_rows([col.coefficient(*exp) for col in columns] for exp in monomials)
        basis_vectors = nullspace(matrix)
    else:
        basis_vectors = [tuple(Fraction(int(i == j)) for j in range(max_degree + 1)) for i in range(max_degree + 1)]
    basis = [Poly1.from_coefficients(vec) for vec in basis_vectors]
    logger.info(f"solution space of {eq.label()} up to degree {max_degree}: dimension {len(basis)}")
    return basis


def biadditive_form(f: Evaluable, x, y):
    """B(x, y) = (f(x+y) - f(x-y)) / 4."""
    diff = f(x + y) - f(x - y)
    if isinstance(diff, (int, Fraction)):
        return Fraction(diff) / 4
    return diff / 4


class BiadditiveCheck(BaseModel):
    samples: int
    symmetry_defect: float
    additivity_defect: float
    diagonal_defect: float

    def holds(self, tol: float = 0.0) -> bool:
        return max(self.symmetry_defect, self.additivity_defect, self.diagonal_defect) <= tol


def biadditive_check(f: Evaluable, samples: Sequence[Tuple]) -> BiadditiveCheck:
    """Symmetry, additivity in the first argument and B(x,x) = f(x) on (x1, x2, y) samples."""
    sym = add = diag = 0
    for x1, x2, y in samples:
        sym = max(sym, abs(biadditive_form(f, x1, y) - biadditive_form(f, y, x1)))
        add = max(add, abs(biadditive_form(f, x1 + x2, y) - biadditive_form(f, x1, y) - biadditive_form(f, x2, y)))
        diag = max(diag, abs(biadditive_form(f, x1, x1) - f(x1)))
    return BiadditiveCheck(
        samples=len(samples),
        symmetry_defect=float(sym),
        additivity_defect=float(add),
        diagonal_defect=float(diag),
    )


def closed_triples(table: TableFunction, c: int) -> np.ndarray:
    """Triples over the table's coordinates (and 0) whose equation arguments all
    stay where the table is defined."""
    equation = main_equation(c)
    coords = sorted(set(table.points) | {0.0})
    kept = []
    for x, y, z in itertools.product(coords, repeat=3):
        if x == y == z == 0.0:
            continue
        if all(table.has(a * x + b * y + g * z) for a, b, g in equation.arguments()):
            kept.append((x, y, z))
    return np.array(kept, dtype=np.float64).reshape(-1, 3)


def max_abs_residual(f: Evaluable, c: int, triples: np.ndarray) -> float:
    if len(triples) == 0:
        return 0.0
    values = residual_main(f, c, triples[:, 0], triples[:, 1], triples[:, 2])
    return float(np.max(np.abs(values)))
