"""CSV and JSON result output."""

import csv
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, TextIO

import numpy as np

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """Stable text form of one CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(format_value(v) for v in value)
    if value is None:
        return ""
    return str(value)


def _json_default(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class ResultWriter:
    """
    Writes named tables and reports into an output directory, or to a
    stream when no directory is set.

    CSV uses ',' separators and LF line endings.
    """

    def __init__(self, out_dir: Optional[str] = None, stream: Optional[TextIO] = None):
        self._out_dir = Path(out_dir) if out_dir else None
        self._stream = stream
        if self._out_dir is not None:
            self._out_dir.mkdir(parents=True, exist_ok=True)
        self.written: List[str] = []

    def _open(self, filename: str):
        if self._out_dir is None:
            return None
        path = self._out_dir / filename
        self.written.append(str(path))
        return open(path, "w", encoding="utf-8", newline="")

    def write_csv(self, name: str, rows: Iterable[Dict[str, Any]], columns: Optional[List[str]] = None) -> None:
        rows = list(rows)
        if columns is None:
            columns = list(rows[0].keys()) if rows else []
        handle = self._open(f"{name}.csv")
        target = handle or self._stream or sys.stdout
        try:
            writer = csv.writer(target, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row.get(column)) for column in columns])
        finally:
            if handle is not None:
                handle.close()
        logger.info(f"Wrote {len(rows)} rows to {name}.csv" if handle else f"Wrote {len(rows)} rows of {name}")

    def write_json(self, name: str, payload: Any) -> None:
        handle = self._open(f"{name}.json")
        target = handle or self._stream or sys.stdout
        try:
            json.dump(payload, target, indent=2, sort_keys=True, default=_json_default)
            target.write("\n")
        finally:
            if handle is not None:
                handle.close()
