"""RF simulation application service."""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from app.application.common.context import RunContext
from app.config.constants import REFERENCE_FLIP_FLOP_CANDIDATES
from app.domain.rf.assignment import CANDIDATE_STATE_PAIRS, assign_configuration
from app.domain.rf.rules import RETENTION_THRESHOLD, SNAP_TOLERANCE_MHZ
from app.domain.rf.simulation import listed_frequency_check, rabi_trace, truth_table
from app.domain.rf.value_objects import RFPulse, TruthTable
from app.domain.spins.value_objects import JahnTellerAxis

logger = logging.getLogger(__name__)


class RFService:
    """Simulates Rabi responses of single P1 centers at the run's field."""

    def __init__(
        self,
        context: RunContext,
        rabi_khz: float = 250.0,
        steps_per_period: int = 40,
        threshold: float = RETENTION_THRESHOLD,
        snap_tolerance: float = SNAP_TOLERANCE_MHZ,
    ):
        self._context = context
        self._rabi_khz = rabi_khz
        self._steps = steps_per_period
        self._threshold = threshold
        self._snap_tolerance = snap_tolerance

    def simulate_table(
        self,
        jt: str,
        frequencies: Optional[Sequence[float]] = None,
        snap: bool = True,
        include_nuclear_drive: bool = True,
        anchor: bool = True,
    ) -> TruthTable:
        """
        Simulated table; without frequencies the tabulated listing of the axis is used.

        With anchor the tabulated lines of the axis pin the simulated
        transitions they sit on, and every frequency is driven as given.
        """
        ctx = self._context
        axis = JahnTellerAxis(jt)
        listing = [row.listed_mhz for row in TruthTable.reference(axis.axis).rows]
        if frequencies is None:
            frequencies = listing
        return truth_table(
            ctx.b, axis, frequencies, self._rabi_khz, None, ctx.constants,
            snap=snap, snap_tolerance=self._snap_tolerance, threshold=self._threshold,
            steps_per_period=self._steps, include_nuclear_drive=include_nuclear_drive,
            anchor_lines=listing if anchor else None,
        )

    def truth_table_rows(self, jt: str, frequencies: Optional[Sequence[float]] = None, **kwargs) -> List[Dict[str, object]]:
        """Simulated bits next to the tabulated bits and the nearest simulated gap."""
        ctx = self._context
        axis = JahnTellerAxis(jt)
        table = self.simulate_table(axis.axis, frequencies, **kwargs)
        reference = TruthTable.reference(axis.axis)
        gaps = listed_frequency_check(ctx.b, axis, [row.listed_mhz for row in table.rows], ctx.constants)
        rows = []
        for row, gap in zip(table.rows, gaps):
            expected = reference.row_for(row.listed_mhz, 1e-6)
            rows.append({
                "jt": axis.axis,
                "listed_MHz": row.listed_mhz,
                "drive_MHz": row.drive_mhz,
                "nearest_gap_MHz": gap["nearest_gap_MHz"],
                "offset_MHz": gap["offset_MHz"],
                "bits": row.bit_string,
                "reference_bits": expected.bit_string if expected else "",
                "matches": bool(expected and expected.bits == row.bits),
            })
        mismatches = sum(1 for row in rows if row["reference_bits"] and not row["matches"])
        if mismatches:
            logger.warning(f"JT {axis.axis}: {mismatches} simulated rows differ from the tabulated bits")
        return rows

    def rabi_rows(self, jt: str, label: str, frequency: float, samples: Optional[int] = 400) -> List[Dict[str, float]]:
        ctx = self._context
        pulse = RFPulse(frequency=frequency, rabi_khz=self._rabi_khz)
        times, trace = rabi_trace(
            ctx.b, JahnTellerAxis(jt), label, pulse, samples, ctx.constants, self._steps
        )
        return [{"time_us": float(t), "retention": float(p)} for t, p in zip(times, trace)]

    def assign(
        self,
        observations: Sequence[Tuple[float, bool]],
        axes: Sequence[str] = ("A", "B", "C", "D"),
        use_reference: bool = True,
    ) -> List[Dict[str, str]]:
        """Configurations consistent with observed responses, from tabulated or simulated tables."""
        if use_reference:
            tables = {axis: TruthTable.reference(axis) for axis in axes}
        else:
            tables = {axis: self.simulate_table(axis) for axis in axes}
        matches = assign_configuration(observations, tables, candidate_pairs=CANDIDATE_STATE_PAIRS)
        return [{"jt": axis, "state_a": pair[0], "state_b": pair[1]} for axis, pair in matches]

    @staticmethod
    def reference_candidates() -> List[Dict[str, object]]:
        """Tabulated flip-flop candidates per observed resonance."""
        return [
            {"tau_us": tau, "jt": jt, "candidates": ";".join(f"{a}/{b}" for a, b in pairs)}
            for tau, (jt, pairs) in sorted(REFERENCE_FLIP_FLOP_CANDIDATES.items())
        ]
