"""Assignment of flip-flop configurations from RF response patterns."""

import logging
from typing import Dict, List, Sequence, Tuple

from .exceptions import InconsistentObservationError
from .rules import FREQUENCY_MATCH_MHZ
from .value_objects import TruthTable

logger = logging.getLogger(__name__)

# Flip-flop state pairs considered per JT axis; fixed-nitrogen pairs first
CANDIDATE_STATE_PAIRS: Tuple[Tuple[str, str], ...] = (
    ("+u", "+d"),
    ("0u", "0d"),
    ("-u", "-d"),
    ("0d", "-u"),
    ("+d", "0u"),
)


def expected_response(table: TruthTable, frequency: float, pair: Tuple[str, str], tolerance: float) -> bool:
    """A pair responds when either of its states responds; unlisted frequencies give no response."""
    row = table.row_for(frequency, tolerance)
    if row is None:
        return False
    return row.responds(pair[0]) or row.responds(pair[1])


def assign_configuration(
    observations: Sequence[Tuple[float, bool]],
    tables: Dict[str, TruthTable],
    tolerance: float = FREQUENCY_MATCH_MHZ,
    candidate_pairs: Sequence[Tuple[str, str]] = CANDIDATE_STATE_PAIRS,
) -> List[Tuple[str, Tuple[str, str]]]:
    """
    Every (JT axis, state pair) whose table reproduces the observed responses.

    observations holds (drive frequency MHz, responded) tuples.

    Raises:
        InconsistentObservationError: If no candidate matches
    """
    if not observations:
        raise ValueError("At least one observed frequency is required")
    candidates = []
    for axis, table in tables.items():
        for pair in candidate_pairs:
            if all(
                expected_response(table, frequency, pair, tolerance) == bool(responded)
                for frequency, responded in observations
            ):
                candidates.append((axis, tuple(pair)))
    if not candidates:
        raise InconsistentObservationError(
            "No configuration reproduces the observed RF responses",
            details={"observations": [[float(f), bool(r)] for f, r in observations]}
        )
    logger.info(f"{len(candidates)} candidate configuration(s) for {len(observations)} observed frequencies")
    return candidates
