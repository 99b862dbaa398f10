"""
Univariate real functions f with f(0) = 0, the inputs of every residual and
iteration in the lab.

Each variant is a frozen pydantic model that is also callable. Calls accept a
Python scalar or a numpy array; Polynomial variants stay exact on int/Fraction
arguments.
"""

from fractions import Fraction
from functools import lru_cache
from typing import Annotated, Dict, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, InstanceOf, field_validator, model_validator

from quadlab.services.exact import Poly1

_MASK64 = (1 << 64) - 1


def float_bits(x: float) -> int:
    """binary64 bit pattern of x as an unsigned int; -0.0 and 0.0 share a key."""
    x = float(x)
    if x == 0.0:
        x = 0.0
    return int(np.array(x, dtype=np.float64).view(np.uint64))


@lru_cache(maxsize=1 << 18)
def unit_noise(seed: int, bits: int) -> float:
    """Counter-based draw in [-1, 1) keyed by (seed, bits); no shared stream."""
    key = ((seed & _MASK64) << 64) | bits
    gen = np.random.Generator(np.random.Philox(key=key))
    return 2.0 * float(gen.random()) - 1.0


def _as_float_array(x):
    return np.asarray(x, dtype=np.float64)


def _restore_scalar(x, out):
    return float(out) if np.ndim(x) == 0 else out


class _FunctionBase(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class PolynomialFunction(_FunctionBase):
    kind: Literal["polynomial"] = "polynomial"
    poly: InstanceOf[Poly1]

    @model_validator(mode="after")
    def _vanishes_at_origin(self):
        if self.poly.coefficient(0) != 0:
            raise ValueError("f(0) must be 0: polynomial has a nonzero constant term")
        return self

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            return self.poly(Fraction(x))
        if np.ndim(x) == 0:
            return float(self.poly(float(x)))
        return self.poly(_as_float_array(x))

    def describe(self) -> str:
        return str(self.poly)


class QuadPlusPower(_FunctionBase):
    """a*x^2 + eps0*|x|^p, with the value at 0 pinned to 0."""

    kind: Literal["quadpow"] = "quadpow"
    a: float
    eps0: float = Field(ge=0)
    p: float = Field(ge=0)

    def __call__(self, x):
        arr = _as_float_array(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(arr == 0.0, 0.0, self.a * arr * arr + self.eps0 * np.abs(arr) ** self.p)
        return _restore_scalar(x, out)

    def describe(self) -> str:
        return f"quadpow({self.a!r},{self.eps0!r},{self.p!r})"


class QuadPlusNoise(_FunctionBase):
    """a*x^2 + u(x), u deterministic in x with |u| <= eta and u(0) = 0."""

    kind: Literal["quadnoise"] = "quadnoise"
    a: float
    eta: float = Field(ge=0)
    seed: int

    def noise(self, x):
        arr = _as_float_array(x)
        flat = [0.0 if v == 0.0 else self.eta * unit_noise(self.seed, float_bits(v)) for v in arr.ravel()]
        return _restore_scalar(x, np.array(flat, dtype=np.float64).reshape(arr.shape))

    def __call__(self, x):
        arr = _as_float_array(x)
        out = self.a * arr * arr + self.noise(arr)
        return _restore_scalar(x, out)

    def describe(self) -> str:
        return f"quadnoise({self.a!r},{self.eta!r},{self.seed})"


class TableFunction(_FunctionBase):
    """Values on a finite set of coordinates; evaluation elsewhere is an error."""

    kind: Literal["table"] = "table"
    points: Dict[float, float]

    @field_validator("points")
    @classmethod
    def _origin_is_zero(cls, points):
        if points.get(0.0, 0.0) != 0.0:
            raise ValueError("f(0) must be 0 for a table function")
        return points

    def has(self, x: float) -> bool:
        return float(x) == 0.0 or float(x) in self.points

    def _lookup(self, v: float) -> float:
        if v == 0.0:
            return 0.0
        try:
            return self.points[v]
        except KeyError:
            raise ValueError(f"table function is not defined at {v!r}") from None

    def __call__(self, x):
        arr = _as_float_array(x)
        out = np.array([self._lookup(float(v)) for v in arr.ravel()], dtype=np.float64).reshape(arr.shape)
        return _restore_scalar(x, out)

    def describe(self) -> str:
        return f"table({len(self.points)} points)"


FunctionExpr = Annotated[
    Union[PolynomialFunction, QuadPlusPower, QuadPlusNoise, TableFunction],
    Field(discriminator="kind"),
]


def polynomial(poly: Poly1) -> PolynomialFunction:
    return PolynomialFunction(poly=poly)


def square(a=1) -> PolynomialFunction:
    """a*x^2, the exact solutions."""
    return PolynomialFunction(poly=Poly1.monomial(2, a))
