"""Imaging result records."""

from dataclasses import dataclass, field
from typing import List, Tuple

from .value_objects import GeometryFit, StatePair


@dataclass
class PermutationResult:
    """Fit of one candidate-state assignment."""
    index: int
    assignment: Tuple[StatePair, ...]
    fit: GeometryFit
    tied: bool = False

    @property
    def rss(self) -> float:
        return self.fit.rss


@dataclass
class BenchmarkRow:
    """Error statistics for one random geometry over its noisy replicas (nm)."""
    position_index: int
    r12_true: List[float]
    r23_true: List[float]
    p1_error_mean: float
    p1_error_median: float
    nv_error_mean: float
    nv_error_median: float
    nv_error_max: float
    p1_axis_errors: List[float] = field(default_factory=list)
    nv_axis_errors: List[float] = field(default_factory=list)
    n_noisy_sets: int = 0
