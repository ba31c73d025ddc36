"""Protocol result records."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .value_objects import ThresholdScheme


@dataclass
class InitializationStats:
    """Emulated initialization cost of one scheme, in measurements and seconds."""
    scheme: ThresholdScheme
    n_successes: int
    mean_measurements: float
    std_measurements: float
    mean_time_s: float
    std_time_s: float
    attempts: int
    true_positive_fraction: Optional[float] = None

    @property
    def stderr_time_s(self) -> float:
        return self.std_time_s / np.sqrt(max(self.n_successes, 1))


@dataclass
class ThresholdOptimum:
    """Grid search result over (theta, lambda) with the no-check baseline."""
    best: InitializationStats
    baseline: InitializationStats
    surface: List[InitializationStats] = field(default_factory=list)
    second_check: Optional[InitializationStats] = None

    @property
    def speedup(self) -> float:
        return self.baseline.mean_time_s / self.best.mean_time_s


@dataclass
class JointCounts:
    """Per-shot heralding counts and readout click records."""
    init_counts: np.ndarray
    readouts: np.ndarray
    state_a: np.ndarray

    def __post_init__(self):
        self.init_counts = np.asarray(self.init_counts, dtype=int)
        self.readouts = np.asarray(self.readouts, dtype=np.int8)
        if self.readouts.ndim != 2 or self.readouts.shape[0] != self.init_counts.shape[0]:
            raise ValueError("Readouts need one row per heralding count")

    @property
    def n_max(self) -> int:
        return self.readouts.shape[1]

    def readout_counts(self, n: int) -> np.ndarray:
        if not 0 < n <= self.n_max:
            raise ValueError(f"n must lie in [1, {self.n_max}], got {n}")
        return self.readouts[:, :n].sum(axis=1)
