"""Dynamics result records."""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np


@dataclass
class TimeTrace:
    """Per-measurement click outcomes (0/1) of a repetitive readout."""
    outcomes: np.ndarray
    synthetic: bool = True
    signal_mask: np.ndarray = None

    def __post_init__(self):
        self.outcomes = np.asarray(self.outcomes, dtype=np.int8)
        if self.outcomes.ndim != 1:
            raise ValueError("Trace outcomes must be one-dimensional")
        if self.outcomes.size and (self.outcomes.min() < 0 or self.outcomes.max() > 1):
            raise ValueError("Trace outcomes must be 0 or 1")

    def __len__(self) -> int:
        return len(self.outcomes)

    def bin_counts(self, bin_size: int) -> np.ndarray:
        """Counts per consecutive bin of bin_size measurements; a partial tail is dropped."""
        if bin_size < 1:
            raise ValueError("bin_size must be positive")
        n_bins = len(self.outcomes) // bin_size
        return self.outcomes[: n_bins * bin_size].reshape(n_bins, bin_size).sum(axis=1)

    def high_bin_fraction(self, bin_size: int, threshold: float) -> float:
        counts = self.bin_counts(bin_size)
        if counts.size == 0:
            return 0.0
        return float(np.mean(counts > threshold))


@dataclass
class DDSpectrumPoint:
    """Simulated decoupling response at one tau."""
    tau: float
    mean_fidelity: float
    expected_counts: float
    sampled_counts: float
    normalized_signal: float
    pair_fidelities: Dict[str, float] = field(default_factory=dict)
