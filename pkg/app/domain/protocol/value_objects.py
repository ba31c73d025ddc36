"""Protocol value objects."""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from app.domain.common.value_object import ValueObject
from .rules import ProtocolRules


@dataclass(frozen=True)
class ThresholdScheme(ValueObject):
    """
    Heralded initialization by repetitive parity readout.

    checks are consecutive (bin size, minimum counts) segments at the start
    of the window; the attempt aborts at the first failing check.
    """
    checks: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)
    total_readouts: int = 50
    final_threshold: int = 15

    def __post_init__(self):
        checks = tuple((int(theta), int(lam)) for theta, lam in self.checks)
        if self.total_readouts < 1:
            raise ValueError("total_readouts must be positive")
        if not 0 <= self.final_threshold <= self.total_readouts:
            raise ValueError("final_threshold must lie in [0, total_readouts]")
        ProtocolRules.validate_checks(checks, self.total_readouts)
        self._set("checks", checks)

    def with_check(self, theta: int, lam: int) -> "ThresholdScheme":
        return self.evolve(checks=self.checks + ((theta, lam),))

    def describe(self) -> str:
        if not self.checks:
            return "no checks"
        return ", ".join(f"theta={theta} lambda={lam}" for theta, lam in self.checks)


@dataclass(frozen=True)
class ReadoutModel(ValueObject):
    """
    Binomial count model of initialization plus readout.

    The pair is in state a (clicking with p_a) or b (p_b). The heralding
    step records N(k) counts; readout i clicks with the state's probability
    pulled toward the midpoint by contrast_decay**i.
    """
    p_a: float = 0.5
    p_b: float = 0.04
    prior_a: float = 0.5
    contrast_decay: float = 1.0
    k: int = 10
    n_a: int = 8
    n_b: int = 1

    def __post_init__(self):
        for name in ("p_a", "p_b", "prior_a"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if not 0.0 < self.contrast_decay <= 1.0:
            raise ValueError(f"contrast_decay must lie in (0, 1], got {self.contrast_decay}")
        if self.k < 0:
            raise ValueError("k cannot be negative")

    def readout_probabilities(self, state_a: bool, n: int) -> List[float]:
        """Click probability of each of n successive readouts."""
        mid = 0.5 * (self.p_a + self.p_b)
        p = self.p_a if state_a else self.p_b
        return [mid + (p - mid) * self.contrast_decay ** i for i in range(n)]


@dataclass(frozen=True)
class ReadoutOptimum(ValueObject):
    """Best (n, T) with the per-n best threshold curve."""
    n: int
    threshold: int
    fidelity: float
    best_per_n: Tuple[Tuple[int, int, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not 0.0 <= self.fidelity <= 1.0:
            raise ValueError(f"Fidelity must lie in [0, 1], got {self.fidelity}")

    def to_dict(self) -> Dict[str, float]:
        return {"n": self.n, "T": self.threshold, "F": self.fidelity}
