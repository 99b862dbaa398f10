import csv
import io
import json
import math
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional


def to_jsonable(value: Any) -> Any:
    """Plain JSON values; non-finite floats become strings, Fractions exact strings."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return to_jsonable(value.item())
    return str(value)


def format_jsonl(records: Iterable[Dict[str, Any]]) -> str:
    return "".join(json.dumps(to_jsonable(r), sort_keys=True, ensure_ascii=False) + "\n" for r in records)


def format_csv(records: Iterable[Dict[str, Any]]) -> str:
    rows = [to_jsonable(r) for r in records]
    fields = sorted({key for row in rows for key in row})
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v for k, v in row.items()})
    return buffer.getvalue()


FORMATTERS = {"jsonl": format_jsonl, "csv": format_csv}


@contextmanager
def open_output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as handle:
        yield handle


def write_records(records: List[Dict[str, Any]], fmt: str = "jsonl", path: Optional[str] = None) -> None:
    """Write the report body in one piece so the bytes depend only on the records."""
    body = FORMATTERS[fmt](records)
    with open_output(path) as handle:
        handle.write(body)
