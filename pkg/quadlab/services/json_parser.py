"""
Helpers for reading json-lines reports back.
Handles blank lines and log-prefixed lines.
"""

import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

logger = logging.getLogger("quadlab.cli")


def extract_record(line: str, required_fields: Optional[List[str]] = None) -> Optional[Dict[str, Any]]:
    """
    Parse one report line.

    Args:
        line: a json-lines line, possibly preceded by log noise
        required_fields: if given, fall back to the first {...} object containing one of them

    Returns:
        The record dict, or None if the line holds no record
    """
    line = line.strip()
    if not line:
        return None

    try:
        parsed = json.loads(line)
        if isinstance(parsed, dict):
            return parsed
    except json.JSONDecodeError:
        pass

    if required_fields:
        field_pattern = "|".join(f'"{re.escape(field)}"' for field in required_fields)
        match = re.search(rf"\{{.*({field_pattern}).*\}}", line)
        if match:
            try:
                parsed = json.loads(match.group())
                if isinstance(parsed, dict):
                    return parsed
            except json.JSONDecodeError:
                pass

    return None


def read_json_lines(source: Union[str, Path], required_fields: Optional[List[str]] = None) -> List[Dict[str, Any]]:
    """Read every record of a json-lines report file; unparseable lines are logged and skipped."""
    text = Path(source).read_text(encoding="utf-8")
    records = []
    for number, line in enumerate(text.splitlines(), start=1):
        record = extract_record(line, required_fields)
        if record is None:
            if line.strip():
                logger.warning(f"{source}:{number}: skipping non-record line")
            continue
        records.append(record)
    return records
