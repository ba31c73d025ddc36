"""Imaging value objects."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from app.domain.common.value_object import ValueObject
from app.domain.spins.value_objects import JahnTellerAxis, SphericalVector
from .rules import ImagingRules

StatePair = Tuple[str, str]


class ObservationKind(str, Enum):
    """Which effective coupling an observation measures."""
    X = "X"
    Z = "Z"
    D1 = "D1"
    D2 = "D2"

    @classmethod
    def parse(cls, text: str) -> "ObservationKind":
        if isinstance(text, cls):
            return text
        aliases = {
            "X": cls.X,
            "P1-P1": cls.X,
            "Z": cls.Z,
            "DETUNING": cls.Z,
            "D1": cls.D1,
            "NV-P1": cls.D1,
            "D2": cls.D2,
        }
        key = str(text).strip().upper()
        if key not in aliases:
            raise ValueError(f"Unknown observation kind: {text}")
        return aliases[key]

    @property
    def needs_nv(self) -> bool:
        return self is not ObservationKind.X


@dataclass(frozen=True)
class CouplingObservation(ValueObject):
    """Measured coupling (kHz) with its JT axis and candidate flip-flop pairs."""
    tau: float
    jt: str
    candidates: Tuple[StatePair, ...]
    value_khz: float
    kind: ObservationKind = ObservationKind.X

    def __post_init__(self):
        ImagingRules.validate_measurement(self.value_khz)
        if not self.candidates:
            raise ValueError("An observation needs at least one candidate state pair")
        self._set("jt", JahnTellerAxis(self.jt).axis)
        self._set("kind", ObservationKind.parse(self.kind))
        self._set("candidates", tuple(tuple(pair) for pair in self.candidates))


@dataclass(frozen=True)
class GeometryFit(ValueObject):
    """
    Best multi-start least-squares solution.

    Reported up to inversion symmetry; stderr keys are '<vector>_<r|theta|phi>'.
    """
    r12: Optional[SphericalVector]
    r23: Optional[SphericalVector]
    stderr: Dict[str, float]
    rss: float
    n_starts: int
    n_converged: int
    assignment: Tuple[StatePair, ...] = field(default_factory=tuple)
    permutation_index: Optional[int] = None
    underdetermined: bool = False

    def __post_init__(self):
        if self.rss < 0:
            raise ValueError("RSS cannot be negative")
        if any(v < 0 for v in self.stderr.values()):
            raise ValueError("Standard errors cannot be negative")

    def with_permutation(self, index: int) -> "GeometryFit":
        return self.evolve(permutation_index=index)

    def to_dict(self) -> dict:
        return {
            "r12": self.r12.to_list() if self.r12 else None,
            "r23": self.r23.to_list() if self.r23 else None,
            "stderr": dict(self.stderr),
            "rss_kHz2": self.rss,
            "n_starts": self.n_starts,
            "n_converged": self.n_converged,
            "assignment": [list(pair) for pair in self.assignment],
            "permutation_index": self.permutation_index,
            "underdetermined": self.underdetermined,
        }


@dataclass(frozen=True, eq=False)
class LeastSquaresResult(ValueObject):
    """Outcome of one local least-squares run."""
    x: np.ndarray
    residuals: np.ndarray
    jacobian: np.ndarray
    success: bool
    message: str = ""
    nfev: int = 0

    @property
    def rss(self) -> float:
        return float(np.sum(self.residuals ** 2))
