"""Dynamics application service."""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.application.common.context import RunContext
from app.domain.dynamics.entities import TimeTrace
from app.domain.dynamics.propagation import dd_spectrum, jt_pairs
from app.domain.dynamics.traces import synthesize_time_trace
from app.domain.dynamics.value_objects import PhotonModel, TimeTraceModel

logger = logging.getLogger(__name__)

STREAM_DD = 1
STREAM_TRACE = 2


class DynamicsService:
    """Runs decoupling simulations and trace synthesis for one run context."""

    def __init__(self, context: RunContext, photon: PhotonModel, trace_model: TimeTraceModel):
        self._context = context
        self._photon = photon
        self._trace_model = trace_model

    def dd_spectrum(self, tau_grid: Sequence[float], n_units: int, same_axis_only: bool = False) -> List[Dict[str, float]]:
        """Averaged decoupling response rows with one fidelity column per JT pair."""
        ctx = self._context
        points = dd_spectrum(
            ctx.b, ctx.geometry, tau_grid, n_units, self._photon, ctx.rng(STREAM_DD),
            ctx.constants, jt_pairs(same_axis_only),
        )
        rows = []
        for point in points:
            row = {
                "tau_us": point.tau,
                "fidelity": point.mean_fidelity,
                "expected_counts": point.expected_counts,
                "sampled_counts": point.sampled_counts,
                "normalized_signal": point.normalized_signal,
            }
            row.update({f"fidelity_{name}": value for name, value in sorted(point.pair_fidelities.items())})
            rows.append(row)
        return rows

    def synthesize_trace(self, n_measurements: int, initial_signal: Optional[bool] = None) -> TimeTrace:
        return synthesize_time_trace(self._trace_model, n_measurements, self._context.rng(STREAM_TRACE), initial_signal)

    def trace_rows(self, trace: TimeTrace) -> List[Dict[str, int]]:
        """Per-bin counts of a trace."""
        counts = trace.bin_counts(self._trace_model.bin_size)
        threshold = self._trace_model.bin_threshold
        high = counts > threshold
        logger.info(f"Trace: {counts.size} bins, {np.mean(high) if counts.size else 0.0:.4f} above {threshold:.1f} counts")
        return [
            {"bin": k, "counts": int(c), "high": bool(h)}
            for k, (c, h) in enumerate(zip(counts, high))
        ]
