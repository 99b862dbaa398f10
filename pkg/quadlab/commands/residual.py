import logging

from quadlab.services.error_handler import EXIT_OK, ValidationFailure
from quadlab.services.expr_parser import parse_function, parse_points
from quadlab.services.funceq import EquationId, symbolic_residual
from quadlab.services.functions import PolynomialFunction
from quadlab.services.report_writer import write_records

logger = logging.getLogger("quadlab.cli")


def add_parser(subparsers):
    parser = subparsers.add_parser("residual", help="evaluate or expand the equation residual of f")
    parser.add_argument("--f", required=True, help='function, e.g. "x^2", "3/2*x^2 - x", "quadpow(1,0.1,1)"')
    parser.add_argument("--eq", choices=["main", "base"], default="main")
    parser.add_argument("--c", type=int, help="equation parameter, c ≠ 0, ±1")
    parser.add_argument("--at", action="append", default=[], metavar="X,Y,Z", help="evaluation point (repeatable)")
    parser.add_argument("--symbolic", action="store_true", help="print the expanded residual polynomial")
    parser.set_defaults(handler=run)
    return parser


def run(args) -> int:
    eq = EquationId.base() if args.eq == "base" else EquationId.main(_require_c(args.c))
    f = parse_function(args.f)
    records = []

    if args.symbolic:
        if not isinstance(f, PolynomialFunction):
            raise ValidationFailure("--symbolic needs a polynomial f")
        residual = symbolic_residual(f.poly, eq)
        records.append(
            {"equation": eq.label(), "f": f.describe(), "residual": str(residual), "zero": residual.is_zero()}
        )

    equation = eq.equation()
    arity = (2, 3) if eq.kind == "base" else (3,)
    for point in parse_points(args.at, arity):
        x, y, z = (tuple(point) + (0, 0))[:3]
        if not isinstance(f, PolynomialFunction):
            x, y, z = float(x), float(y), float(z)
        value = equation.residual(f, x, y, z)
        records.append({"equation": eq.label(), "f": f.describe(), "at": list(point), "residual": value})

    if not records:
        raise ValidationFailure("nothing to do: pass --symbolic or at least one --at point")

    write_records(records, args.format, args.output)
    return EXIT_OK


def _require_c(c):
    if c is None:
        raise ValidationFailure("the main equation needs --c (an integer with c ≠ 0, ±1)")
    return c
