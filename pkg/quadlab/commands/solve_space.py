from quadlab.services.error_handler import EXIT_OK, ValidationFailure
from quadlab.services.funceq import EquationId, solution_space
from quadlab.services.report_writer import write_records


def add_parser(subparsers):
    parser = subparsers.add_parser("solve-space", help="basis of the polynomial solutions up to a degree")
    parser.add_argument("--eq", choices=["main", "base"], default="main")
    parser.add_argument("--c", type=int)
    parser.add_argument("--max-degree", type=int, required=True)
    parser.set_defaults(handler=run)
    return parser


def run(args) -> int:
    if args.eq == "main":
        if args.c is None:
            raise ValidationFailure("the main equation needs --c (an integer with c ≠ 0, ±1)")
        eq = EquationId.main(args.c)
    else:
        eq = EquationId.base()
    basis = solution_space(eq, args.max_degree)
    write_records(
        [
            {
                "equation": eq.label(),
                "max_degree": args.max_degree,
                "dimension": len(basis),
                "basis": [str(p) for p in basis],
            }
        ],
        args.format,
        args.output,
    )
    return EXIT_OK
