"""Readers for recorded traces and coupling observations."""

import csv
import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np

from app.domain.dynamics.entities import TimeTrace
from app.domain.imaging.value_objects import CouplingObservation

logger = logging.getLogger(__name__)

OBSERVATION_COLUMNS = ("tau_us", "jt", "candidates", "value_kHz", "kind")


def parse_candidates(text: str) -> Tuple[Tuple[str, str], ...]:
    """'+u/+d;+d/0u' -> (('+u', '+d'), ('+d', '0u'))."""
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split("/")]
        if len(parts) != 2:
            raise ValueError(f"Candidate pair must look like 'a/b', got '{chunk}'")
        pairs.append((parts[0], parts[1]))
    return tuple(pairs)


def read_observations(path: str) -> List[CouplingObservation]:
    """Observation CSV with columns tau_us, jt, candidates, value_kHz and optional kind."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        missing = set(OBSERVATION_COLUMNS[:4]) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"Observation file {path} lacks columns {sorted(missing)}")
        observations = [
            CouplingObservation(
                tau=float(row["tau_us"]),
                jt=row["jt"],
                candidates=parse_candidates(row["candidates"]),
                value_khz=float(row["value_kHz"]),
                kind=row.get("kind") or "X",
            )
            for row in reader
        ]
    logger.info(f"Read {len(observations)} observations from {Path(path).name}")
    return observations


def read_trace(path: str) -> TimeTrace:
    """
    Per-measurement click outcomes, one 0/1 value per line.

    A header line and extra columns are allowed; the first column is used.
    """
    values = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for line_number, row in enumerate(csv.reader(f), start=1):
            if not row or not row[0].strip():
                continue
            cell = row[0].strip()
            if line_number == 1 and not cell.lstrip("-").isdigit():
                continue
            values.append(int(cell))
    logger.info(f"Read trace of {len(values)} measurements from {Path(path).name}")
    return TimeTrace(outcomes=np.array(values, dtype=np.int8), synthetic=False)
