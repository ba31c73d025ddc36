"""Synthetic repetitive-readout time traces."""

import logging
from typing import Optional

import numpy as np

from .entities import TimeTrace
from .value_objects import TimeTraceModel

logger = logging.getLogger(__name__)


def synthesize_time_trace(
    model: TimeTraceModel,
    n_measurements: int,
    rng: np.random.Generator,
    initial_signal: Optional[bool] = None,
) -> TimeTrace:
    """
    Draw per-measurement click outcomes under a hidden configuration.

    The configuration is redrawn at scramble events; a segment responds with
    probability signal_fraction. initial_signal pins the first segment.
    Spontaneous configuration changes between scrambles are not modeled.
    """
    if n_measurements < 0:
        raise ValueError("n_measurements cannot be negative")

    scrambles = rng.random(n_measurements) < model.scramble_probability
    if n_measurements:
        scrambles[0] = False
    segment = np.cumsum(scrambles)
    n_segments = int(segment[-1]) + 1 if n_measurements else 0

    segment_signal = rng.random(n_segments) < model.signal_fraction
    if initial_signal is not None and n_segments:
        segment_signal[0] = bool(initial_signal)
    signal_mask = segment_signal[segment] if n_measurements else np.zeros(0, dtype=bool)

    p_click = np.where(signal_mask, model.p_signal_click, model.p_background_click)
    outcomes = (rng.random(n_measurements) < p_click).astype(np.int8)
    logger.debug(
        f"Synthesized trace: {n_measurements} measurements, {n_segments} segments, "
        f"{signal_mask.mean() if n_measurements else 0.0:.4f} signal share"
    )
    return TimeTrace(outcomes=outcomes, synthetic=True, signal_mask=signal_mask)
