"""Data Transfer Objects for geometry reconstruction."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class PermutationRowDTO:
    """One ranked candidate assignment."""
    index: int
    assignment: str
    rss_kHz2: float
    tied: bool
    r23_nm_rad_rad: List[float]


@dataclass
class FitReportDTO:
    """Full reconstruction of one observation set."""
    permutations: List[PermutationRowDTO] = field(default_factory=list)
    p1_fit: Optional[Dict[str, Any]] = None
    nv_fit: Optional[Dict[str, Any]] = None
    equivalent_geometries: List[Dict[str, List[float]]] = field(default_factory=list)
