"""
Function expressions from the command line and from experiment files.

Polynomials in x with rational coefficients go through sympy; the named
forms quadpow(a,eps0,p) and quadnoise(a,eta,seed) are matched first.
"""

import re
from fractions import Fraction
from typing import Sequence, Tuple

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, rationalize, standard_transformations

from quadlab.services.error_handler import ValidationFailure
from quadlab.services.exact import Poly1, to_rational
from quadlab.services.functions import PolynomialFunction, QuadPlusNoise, QuadPlusPower

_NUMBER = r"\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*"
_QUADPOW = re.compile(rf"^\s*quadpow\s*\({_NUMBER},{_NUMBER},{_NUMBER}\)\s*$")
_QUADNOISE = re.compile(rf"^\s*quadnoise\s*\({_NUMBER},{_NUMBER},\s*([-+]?\d+)\s*\)\s*$")

_TRANSFORMS = standard_transformations + (convert_xor, rationalize)
_X = sympy.Symbol("x")


def parse_polynomial(text: str) -> Poly1:
    """'3/2*x^2 - x' -> Poly1 with exact coefficients."""
    try:
        expr = parse_expr(text, local_dict={"x": _X}, transformations=_TRANSFORMS)
    except (SyntaxError, TypeError, ValueError, sympy.SympifyError) as e:
        raise ValidationFailure(f"cannot parse polynomial {text!r}: {e}") from None
    extra = expr.free_symbols - {_X}
    if extra:
        raise ValidationFailure(f"polynomial {text!r} may only use x (found {', '.join(sorted(map(str, extra)))})")
    if not expr.is_polynomial(_X):
        raise ValidationFailure(f"{text!r} is not a polynomial in x")
    coeffs = sympy.Poly(expr, _X).all_coeffs()[::-1]
    return Poly1.from_coefficients([Fraction(int(c.p), int(c.q)) for c in map(sympy.Rational, coeffs)])


def parse_function(text: str):
    """Parse a function expression into a FunctionExpr variant."""
    match = _QUADPOW.match(text)
    if match:
        a, eps0, p = (float(v) for v in match.groups())
        return _build(QuadPlusPower, a=a, eps0=eps0, p=p)
    match = _QUADNOISE.match(text)
    if match:
        a, eta, seed = match.groups()
        return _build(QuadPlusNoise, a=float(a), eta=float(eta), seed=int(seed))
    return _build(PolynomialFunction, poly=parse_polynomial(text))


def _build(model, **fields):
    try:
        return model(**fields)
    except ValueError as e:
        # pydantic.ValidationError is a ValueError; keep the first message only
        errors = getattr(e, "errors", None)
        message = errors()[0]["msg"] if callable(errors) else str(e)
        raise ValidationFailure(message) from None


def parse_point(text: str, arity: Tuple[int, ...] = (3,)) -> Tuple[Fraction, ...]:
    """'1,2,3' or '1/2,-1,0.25' -> exact coordinates."""
    parts = [part for part in text.split(",")]
    if len(parts) not in arity:
        raise ValidationFailure(f"expected {' or '.join(map(str, arity))} coordinates, got {text!r}")
    try:
        return tuple(to_rational(part.strip()) for part in parts)
    except (ValueError, ZeroDivisionError):
        raise ValidationFailure(f"coordinates must be numbers: {text!r}") from None


def parse_points(texts: Sequence[str], arity: Tuple[int, ...] = (3,)):
    return [parse_point(text, arity) for text in texts]
