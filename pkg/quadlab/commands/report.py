"""Pretty-print a saved json-lines report, optionally as a PDF table."""

import logging
import sys
from typing import Any, Dict, List

from quadlab.services.error_handler import EXIT_CHECK_FAILURE, EXIT_OK, ValidationFailure
from quadlab.services.json_parser import read_json_lines
from quadlab.services.pdf_report import render_pdf

logger = logging.getLogger("quadlab.cli")

POINT_COLUMNS = ["x", "f", "Q", "err", "bound", "a_priori_bound", "passed"]
SUMMARY_KEYS = [
    "name",
    "c",
    "function",
    "control",
    "j",
    "theoretical_L",
    "printed_L",
    "empirical_L",
    "d_f_Tf",
    "checkpoint",
    "checkpoint_verdict",
    "max_delta_q",
    "delta_q_verdict",
    "uniqueness_gap",
    "uniqueness_verdict",
    "a_priori_verdict",
    "iterations",
    "verdict",
]


def add_parser(subparsers):
    parser = subparsers.add_parser("report", help="pretty-print a saved json-lines report")
    parser.add_argument("path", help="json-lines report file")
    parser.add_argument("--pdf", metavar="OUT", help="also render the report as a PDF table")
    parser.set_defaults(handler=run)
    return parser


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, dict):
        return ",".join(f"{k}={v}" for k, v in sorted(value.items()))
    return str(value)


def format_table(columns: List[str], rows: List[Dict[str, Any]]) -> str:
    cells = [[_fmt(row.get(col, "")) for col in columns] for row in rows]
    widths = [max([len(col)] + [len(r[i]) for r in cells]) for i, col in enumerate(columns)]
    lines = ["  ".join(col.rjust(w) for col, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in cells)
    return "\n".join(lines)


def _layout(records: List[Dict[str, Any]]):
    """(summary pairs, columns, rows) for stability reports and generic record lists."""
    summaries = [r for r in records if r.get("record") == "summary"]
    if summaries:
        summary = summaries[0]
        pairs = [(key, summary[key]) for key in SUMMARY_KEYS if key in summary]
        rows = [r for r in records if r.get("record") == "point"]
        return pairs, POINT_COLUMNS, rows
    columns = sorted({key for r in records for key in r if not isinstance(r[key], list)})
    return [("records", len(records))], columns, records


def run(args) -> int:
    records = read_json_lines(args.path, required_fields=["record", "id", "equation"])
    if not records:
        raise ValidationFailure(f"{args.path}: no report records found")

    pairs, columns, rows = _layout(records)
    out = sys.stdout
    for key, value in pairs:
        out.write(f"{key}: {_fmt(value)}\n")
    out.write("\n" + format_table(columns, rows) + "\n")

    if args.pdf:
        title = str(dict(pairs).get("name", args.path))
        target = render_pdf(args.pdf, title, pairs, columns, rows)
        logger.info(f"PDF report written to {target}")

    failed = any(r.get("verdict") == "fail" or r.get("passed") is False for r in records)
    return EXIT_CHECK_FAILURE if failed else EXIT_OK
