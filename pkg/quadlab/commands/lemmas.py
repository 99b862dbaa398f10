import logging

from quadlab.services.config_loader import load_sweep
from quadlab.services.error_handler import EXIT_CHECK_FAILURE, EXIT_OK
from quadlab.services.lemmas import CATALOG, IdentityId, LemmaSweep, verify_identity
from quadlab.services.report_writer import write_records

logger = logging.getLogger("quadlab.cli")


def add_parser(subparsers):
    parser = subparsers.add_parser("lemmas", help="verify the identity catalog for f(x) = a*x^2")
    parser.add_argument("--only", choices=list(CATALOG), help="verify a single identity")
    for name in ("a", "b", "c", "k"):
        parser.add_argument(f"--{name}", type=int, help=f"identity parameter {name} (with --only)")
    parser.add_argument("--sweep", metavar="FILE", help="YAML parameter sweep (default: built-in sweep)")
    parser.set_defaults(handler=run)
    return parser


def run(args) -> int:
    if args.only:
        given = {name: getattr(args, name) for name in ("a", "b", "c", "k") if getattr(args, name) is not None}
        identities = [IdentityId.of(args.only, **given)]
    elif args.sweep:
        sweep_file = load_sweep(args.sweep)
        identities = list(sweep_file.sweep.identities(sweep_file.labels))
    else:
        identities = list(LemmaSweep().identities())

    verdicts = [verify_identity(identity, seed=args.seed if args.seed is not None else 0) for identity in identities]
    failed = [v for v in verdicts if not v.holds]
    logger.info(f"verified {len(verdicts)} identity instances, {len(failed)} failed")

    write_records(
        [{"id": v.id, "params": v.params, "verdict": v.verdict, "difference": v.difference} for v in verdicts],
        args.format,
        args.output,
    )
    return EXIT_CHECK_FAILURE if failed else EXIT_OK
