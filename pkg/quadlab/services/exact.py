"""
Exact rational arithmetic and sparse polynomial algebra.

Coefficients are `fractions.Fraction` values, so every operation here is exact.
Polynomials are sparse maps from exponents to coefficients; constructors drop
zero coefficients so structural equality is polynomial equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

Rational = Fraction
Scalar = Union[int, Fraction]
Exponent3 = Tuple[int, int, int]


def to_rational(value) -> Fraction:
    """Coerce ints, strings ("3/2") and Fractions to a canonical Fraction.

    Floats are converted exactly (binary value), never rounded.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"Cannot convert {value!r} to a rational number")


def _format_coeff(coeff: Fraction) -> str:
    if coeff.denominator == 1:
        return str(coeff.numerator)
    return f"{coeff.numerator}/{coeff.denominator}"


def _join_terms(parts: List[Tuple[Fraction, str]]) -> str:
    """Render (coefficient, monomial) pairs as `3/2*x^2 - x + 1`."""
    if not parts:
        return "0"
    out = []
    for idx, (coeff, mono) in enumerate(parts):
        sign = "-" if coeff < 0 else "+"
        mag = -coeff if coeff < 0 else coeff
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_format_coeff(mag)}*{mono}"
        else:
            body = _format_coeff(mag)
        if idx == 0:
            out.append(f"-{body}" if sign == "-" else body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def _power_str(var: str, exp: int) -> str:
    if exp == 0:
        return ""
    if exp == 1:
        return var
    return f"{var}^{exp}"


@dataclass(frozen=True)
class Poly1:
    """Univariate polynomial in x with rational coefficients."""

    terms: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[int, Fraction] = {}
        for deg, coeff in self.terms.items():
            if deg < 0:
                raise ValueError(f"Negative degree {deg} in Poly1")
            coeff = to_rational(coeff)
            if coeff != 0:
                clean[int(deg)] = coeff
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def monomial(cls, degree: int, coeff: Scalar = 1) -> "Poly1":
        return cls({degree: to_rational(coeff)})

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[Scalar]) -> "Poly1":
        """Build from [c0, c1, ...] in ascending degree order."""
        return cls({deg: to_rational(c) for deg, c in enumerate(coeffs)})

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return max(self.terms, default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, degree: int) -> Fraction:
        return self.terms.get(degree, Fraction(0))

    def __add__(self, other: "Poly1") -> "Poly1":
        merged = dict(self.terms)
        for deg, coeff in other.terms.items():
            merged[deg] = merged.get(deg, Fraction(0)) + coeff
        return Poly1(merged)

    def __neg__(self) -> "Poly1":
        return Poly1({deg: -coeff for deg, coeff in self.terms.items()})

    def __sub__(self, other: "Poly1") -> "Poly1":
        return self + (-other)

    def scale(self, s: Scalar) -> "Poly1":
        s = to_rational(s)
        return Poly1({deg: s * coeff for deg, coeff in self.terms.items()})

    def __mul__(self, other: "Poly1") -> "Poly1":
        out: Dict[int, Fraction] = {}
        for d1, c1 in self.terms.items():
            for d2, c2 in other.terms.items():
                out[d1 + d2] = out.get(d1 + d2, Fraction(0)) + c1 * c2
        return Poly1(out)

    def __call__(self, t):
        """Horner evaluation.

        Exact for int/Fraction arguments; works elementwise on floats and numpy
        arrays (coefficients are converted to float in that case).
        """
        if self.is_zero():
            return t * 0
        exact = isinstance(t, (int, Fraction))
        acc = 0
        for deg in range(self.degree, -1, -1):
            coeff = self.coefficient(deg)
            acc = acc * t + (coeff if exact else float(coeff))
        return acc

    def __str__(self) -> str:
        parts = [(c, _power_str("x", d)) for d, c in sorted(self.terms.items(), reverse=True)]
        return _join_terms(parts)


def _grlex_key(exp: Exponent3) -> Tuple[int, int, int, int]:
    # Descending graded lexicographic order with x > y > z.
    return (-sum(exp), -exp[0], -exp[1], -exp[2])


@dataclass(frozen=True)
class Poly3:
    """Trivariate polynomial in x, y, z keyed by exponent triples."""

    terms: Mapping[Exponent3, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[Exponent3, Fraction] = {}
        for exp, coeff in self.terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != 3 or min(exp) < 0:
                raise ValueError(f"Invalid exponent triple {exp!r}")
            coeff = to_rational(coeff)
            if coeff != 0:
                clean[exp] = clean.get(exp, Fraction(0)) + coeff
        clean = {e: c for e, c in clean.items() if c != 0}
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: _grlex_key(kv[0]))))

    @classmethod
    def constant(cls, value: Scalar) -> "Poly3":
        return cls({(0, 0, 0): to_rational(value)})

    @classmethod
    def linear(cls, alpha: Scalar, beta: Scalar, gamma: Scalar) -> "Poly3":
        return cls({(1, 0, 0): alpha, (0, 1, 0): beta, (0, 0, 1): gamma})

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coefficient(self, i: int, j: int, k: int) -> Fraction:
        return self.terms.get((i, j, k), Fraction(0))

    def monomials(self) -> Iterator[Tuple[Exponent3, Fraction]]:
        """Terms in canonical (graded lexicographic, x>y>z) order."""
        return iter(self.terms.items())

    def __add__(self, other: "Poly3") -> "Poly3":
        merged = dict(self.terms)
        for exp, coeff in other.terms.items():
            merged[exp] = merged.get(exp, Fraction(0)) + coeff
        return Poly3(merged)

    def __neg__(self) -> "Poly3":
        return Poly3({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Poly3") -> "Poly3":
        return self + (-other)

    def scale(self, s: Scalar) -> "Poly3":
        s = to_rational(s)
        return Poly3({e: s * c for e, c in self.terms.items()})

    def __mul__(self, other: "Poly3") -> "Poly3":
        out: Dict[Exponent3, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[exp] = out.get(exp, Fraction(0)) + c1 * c2
        return Poly3(out)

    def __pow__(self, n: int) -> "Poly3":
        if n < 0:
            raise ValueError("Negative powers are not polynomials")
        result = Poly3.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def evaluate(self, x, y, z):
        """Evaluate at a point; exact for rational arguments."""
        exact = all(isinstance(v, (int, Fraction)) for v in (x, y, z))
        total = Fraction(0) if exact else 0.0
        for (i, j, k), coeff in self.terms.items():
            total += (coeff if exact else float(coeff)) * x**i * y**j * z**k
        return total

    def project_x(self) -> Poly1:
        """Restrict to y = z = 0."""
        return Poly1({i: c for (i, j, k), c in self.terms.items() if j == 0 and k == 0})

    def __str__(self) -> str:
        parts = []
        for (i, j, k), coeff in self.terms.items():
            mono = "*".join(p for p in (_power_str("x", i), _power_str("y", j), _power_str("z", k)) if p)
            parts.append((coeff, mono))
        return _join_terms(parts)


def compose_affine(p: Poly1, alpha: Scalar, beta: Scalar, gamma: Scalar) -> Poly3:
    """Expand p(alpha*x + beta*y + gamma*z) exactly."""
    form = Poly3.linear(to_rational(alpha), to_rational(beta), to_rational(gamma))
    result = Poly3()
    power = Poly3.constant(1)
    for deg in range(p.degree + 1):
        coeff = p.coefficient(deg)
        if coeff != 0:
            result = result + power.scale(coeff)
        power = power * form
    return result


def poly_ring_ops(a: Poly3, b: Poly3, s: Scalar) -> Poly3:
    """Return a + s*b, the axpy combination every residual is built from."""
    return a + b.scale(s)


@dataclass(frozen=True)
class RationalMatrix:
    rows: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(to_rational(v) for v in row) for row in self.rows)
        if rows and any(len(row) != len(rows[0]) for row in rows):
            raise ValueError("Not all rows are of equal length")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Scalar]], cols: int = None) -> "RationalMatrix":
        matrix = cls(tuple(tuple(r) for r in rows))
        if cols is not None and matrix.rows and matrix.cols != cols:
            raise ValueError(f"Expected {cols} columns, got {matrix.cols}")
        return matrix

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.rows), self.cols)

    @property
    def cols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def apply(self, vector: Sequence[Scalar]) -> Tuple[Fraction, ...]:
        """Matrix-vector product."""
        if len(vector) != self.cols:
            raise ValueError(f"Expected vector of length {self.cols}")
        vec = [to_rational(v) for v in vector]
        return tuple(sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in self.rows)

    def rref(self) -> Tuple[List[List[Fraction]], List[int]]:
        """Reduced row echelon form and pivot columns (Gauss-Jordan, exact)."""
        work = [list(row) for row in self.rows]
        pivots: List[int] = []
        r = 0
        for col in range(self.cols):
            pivot_row = next((i for i in range(r, len(work)) if work[i][col] != 0), None)
            if pivot_row is None:
                continue
            work[r], work[pivot_row] = work[pivot_row], work[r]
            lead = work[r][col]
            work[r] = [v / lead for v in work[r]]
            for i in range(len(work)):
                if i != r and work[i][col] != 0:
                    factor = work[i][col]
                    work[i] = [a - factor * b for a, b in zip(work[i], work[r])]
            pivots.append(col)
            r += 1
            if r == len(work):
                break
        return work, pivots

    def rank(self) -> int:
        return len(self.rref()[1])


def nullspace(m: RationalMatrix) -> List[Tuple[Fraction, ...]]:
    """Basis of the right nullspace of m over the rationals.

    One vector per free column: that column set to 1, pivot columns solved from
    the reduced echelon form. An empty list means the nullspace is trivial.
    """
    cols = m.cols
    reduced, pivots = m.rref()
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * cols
        vec[f] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            vec[pc] = -reduced[row_idx][f]
        basis.append(tuple(vec))
    return basis
