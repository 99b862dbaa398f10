from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from quadlab.services.exact import (
    Poly1,
    Poly3,
    RationalMatrix,
    compose_affine,
    nullspace,
    poly_ring_ops,
    to_rational,
)

X, Y, Z = sympy.symbols("x y z")

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
small_ints = st.integers(min_value=-5, max_value=5)
polys = st.lists(rationals, max_size=5).map(Poly1.from_coefficients)


def to_sympy(p: Poly3):
    return sum(
        (sympy.Rational(c.numerator, c.denominator) * X**i * Y**j * Z**k for (i, j, k), c in p.monomials()),
        sympy.Integer(0),
    )


def poly1_to_sympy(p: Poly1, var):
    return sum(
        (sympy.Rational(c.numerator, c.denominator) * var**d for d, c in p.terms.items()),
        sympy.Integer(0),
    )


def test_to_rational():
    assert to_rational("3/2") == Fraction(3, 2)
    assert to_rational(0.25) == Fraction(1, 4)
    assert to_rational(7) == Fraction(7)
    with pytest.raises(TypeError):
        to_rational(object())


def test_zero_polynomial_has_degree_minus_one():
    assert Poly1().degree == -1
    assert Poly1({3: 0}).is_zero()
    assert str(Poly1()) == "0"


def test_poly1_rendering():
    p = Poly1.from_coefficients([0, -1, Fraction(3, 2)])
    assert str(p) == "3/2*x^2 - x"
    assert str(Poly1.monomial(2)) == "x^2"


def test_poly3_grlex_rendering():
    square = compose_affine(Poly1.monomial(2), 1, 1, 0)
    assert str(square) == "x^2 + 2*x*y + y^2"
    mixed = Poly3({(0, 0, 1): 1, (1, 0, 0): 1, (0, 2, 0): -2})
    assert str(mixed) == "-2*y^2 + x + z"


@given(polys, polys, polys)
def test_poly1_ring_laws(p, q, r):
    assert (p + q) - q == p
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert (p * q).degree == (-1 if p.is_zero() or q.is_zero() else p.degree + q.degree)


@given(polys, polys, rationals)
def test_horner_evaluation_is_a_ring_homomorphism(p, q, t):
    assert (p * q)(t) == p(t) * q(t)
    assert (p + q)(t) == p(t) + q(t)


@given(polys, small_ints, small_ints, small_ints, rationals, rationals, rationals)
def test_compose_affine_evaluates_like_substitution(p, a, b, g, x, y, z):
    assert compose_affine(p, a, b, g).evaluate(x, y, z) == p(a * x + b * y + g * z)


@settings(max_examples=40, deadline=None)
@given(polys, small_ints, small_ints, small_ints)
def test_compose_affine_matches_sympy_expansion(p, a, b, g):
    expected = sympy.expand(poly1_to_sympy(p, a * X + b * Y + g * Z))
    assert sympy.expand(to_sympy(compose_affine(p, a, b, g)) - expected) == 0


@given(polys, polys, rationals)
def test_poly_ring_ops_is_axpy(p, q, s):
    a = compose_affine(p, 1, 2, 0)
    b = compose_affine(q, 0, 1, -1)
    combined = poly_ring_ops(a, b, s)
    assert combined == a + b.scale(s)
    assert poly_ring_ops(a, a, -1).is_zero()


def test_poly3_power_and_projection():
    form = Poly3.linear(1, 1, 0)
    assert form**2 == compose_affine(Poly1.monomial(2), 1, 1, 0)
    assert (form**3).project_x() == Poly1.monomial(3)
    assert (form**0) == Poly3.constant(1)


def test_rational_matrix_rejects_ragged_rows():
    with pytest.raises(ValueError):
        RationalMatrix.from_rows([[1, 2], [3]])


def test_rref_and_rank():
    m = RationalMatrix.from_rows([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    reduced, pivots = m.rref()
    assert pivots == [0, 1]
    assert m.rank() == 2
    assert reduced[0] == [1, 0, 1]
    assert reduced[1] == [0, 1, 1]


@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=4))
def test_nullspace_is_sound_and_complete(rows):
    m = RationalMatrix.from_rows(rows)
    basis = nullspace(m)
    assert len(basis) == m.cols - m.rank()
    for vector in basis:
        assert all(v == 0 for v in m.apply(vector))
