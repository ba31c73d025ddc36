"""Noise value objects."""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from app.config.settings import NoiseCorrelation
from app.domain.common.value_object import ValueObject


@dataclass(frozen=True)
class FieldNoiseSpec(ValueObject):
    """
    Quasi-static Gaussian field noise in Gauss.

    local_axes lists the field components (0, 1, 2) drawn for the second
    P1 in site-local mode.
    """
    sigma_x: float
    sigma_y: float
    sigma_z: float
    correlation: NoiseCorrelation = NoiseCorrelation.CORRELATED
    local_axes: Tuple[int, ...] = (2,)

    def __post_init__(self):
        if min(self.sigma_x, self.sigma_y, self.sigma_z) < 0:
            raise ValueError("Field noise amplitudes cannot be negative")
        self._set("correlation", NoiseCorrelation(self.correlation))
        axes = tuple(int(a) for a in self.local_axes)
        if any(a not in (0, 1, 2) for a in axes):
            raise ValueError(f"Site-local axes must be 0, 1 or 2, got {axes}")
        self._set("local_axes", axes)

    @property
    def sigma(self) -> np.ndarray:
        return np.array([self.sigma_x, self.sigma_y, self.sigma_z])

    @property
    def is_silent(self) -> bool:
        return not np.any(self.sigma > 0)

    @classmethod
    def from_sequence(cls, values, correlation=NoiseCorrelation.CORRELATED, local_axes=(2,)) -> "FieldNoiseSpec":
        sx, sy, sz = (float(v) for v in values)
        return cls(sx, sy, sz, correlation, tuple(local_axes))


@dataclass(frozen=True, eq=False)
class DephasingCurve(ValueObject):
    """Bloch-vector length of the averaged pseudo-spin versus time (ms)."""
    times: np.ndarray
    bloch_length: np.ndarray
    t2star: Optional[float]
    gaussian_t2star: Optional[float] = None
    fit_residual: Optional[float] = None
    quasi_static: bool = True

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        length = np.asarray(self.bloch_length, dtype=float)
        if times.shape != length.shape:
            raise ValueError("Times and Bloch lengths must have the same shape")
        if np.any(length < -1e-12) or np.any(length > 1.0 + 1e-9):
            raise ValueError("Bloch-vector length must lie in [0, 1]")
        self._set("times", times)
        self._set("bloch_length", np.clip(length, 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class CouplingDistribution(ValueObject):
    """Monte-Carlo samples of the flip-flop coupling X and the pair splitting (kHz)."""
    x_samples: np.ndarray
    frequency_samples: np.ndarray
    nominal_x: float
    nominal_frequency: float
    correlation: NoiseCorrelation = field(default=NoiseCorrelation.CORRELATED)

    @property
    def x_std(self) -> float:
        finite = self.x_samples[np.isfinite(self.x_samples)]
        return float(finite.std(ddof=1)) if finite.size > 1 else 0.0

    @property
    def frequency_std(self) -> float:
        return float(self.frequency_samples.std(ddof=1)) if self.frequency_samples.size > 1 else 0.0

    @property
    def relative_x_std(self) -> float:
        return self.x_std / abs(self.nominal_x) if self.nominal_x else float("inf")

    def summary(self) -> dict:
        finite = self.x_samples[np.isfinite(self.x_samples)]
        return {
            "correlation": self.correlation.value,
            "n_samples": int(self.frequency_samples.size),
            "nominal_X_kHz": self.nominal_x,
            "mean_X_kHz": float(finite.mean()) if finite.size else float("nan"),
            "std_X_kHz": self.x_std,
            "relative_std_X": self.relative_x_std,
            "nominal_frequency_kHz": self.nominal_frequency,
            "mean_frequency_kHz": float(self.frequency_samples.mean()),
            "median_frequency_kHz": float(np.median(self.frequency_samples)),
            "std_frequency_kHz": self.frequency_std,
        }
