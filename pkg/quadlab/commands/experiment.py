import logging

from quadlab.services.config_loader import load_experiment
from quadlab.services.error_handler import EXIT_CHECK_FAILURE, EXIT_OK
from quadlab.services.report_writer import write_records
from quadlab.services.stability import run_experiment

logger = logging.getLogger("quadlab.cli")


def add_parser(subparsers):
    parser = subparsers.add_parser("experiment", help="run a stability experiment from a YAML file")
    parser.add_argument("config", help="experiment file")
    parser.set_defaults(handler=run)
    return parser


def run(args) -> int:
    config, output = load_experiment(args.config, seed=args.seed)
    report = run_experiment(config)

    fmt = args.format_explicit or output.format or args.format
    path = args.output or output.path
    write_records(report.to_records(), fmt, path)

    if report.ok:
        logger.info(f"{config.name}: pass after {report.iterations} iterations")
        return EXIT_OK
    logger.warning(
        f"{config.name}: verdict={report.verdict}, checkpoint={report.checkpoint_verdict}, "
        f"delta_q={report.delta_q_verdict}, uniqueness={report.uniqueness_verdict}"
    )
    return EXIT_CHECK_FAILURE
