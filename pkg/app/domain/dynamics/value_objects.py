"""Dynamics value objects."""

import math
from dataclasses import dataclass

import numpy as np

from app.domain.common.value_object import ValueObject
from .rules import DynamicsRules


@dataclass(frozen=True)
class DDSequence(ValueObject):
    """
    Dynamical-decoupling sequence of n_units units tau - pi - 2 tau - pi - tau.

    Pulses are instantaneous; tau in us.
    """
    tau: float
    n_units: int

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if int(self.n_units) != self.n_units or self.n_units < 1:
            raise ValueError(f"n_units must be a positive integer, got {self.n_units}")

    @property
    def total_time(self) -> float:
        return 4.0 * self.tau * self.n_units

    def with_units(self, n_units: int) -> "DDSequence":
        return DDSequence(self.tau, n_units)


@dataclass(frozen=True)
class PhotonModel(ValueObject):
    """Single-shot photon statistics of the NV readout."""
    p_click_ms0: float = 0.70
    p_noclick_ms1: float = 0.99
    repetitions: int = 200

    def __post_init__(self):
        DynamicsRules.validate_probability("p_click_ms0", self.p_click_ms0)
        DynamicsRules.validate_probability("p_noclick_ms1", self.p_noclick_ms1)
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")

    @property
    def p_dark(self) -> float:
        """Click probability when the NV ends in m_s = -1."""
        return 1.0 - self.p_noclick_ms1

    def click_probability(self, fidelity):
        """P(click) = F p_click + (1 - F)(1 - p_noclick)."""
        fidelity = np.clip(fidelity, 0.0, 1.0)
        return fidelity * self.p_click_ms0 + (1.0 - fidelity) * self.p_dark

    def expected_counts(self, fidelity):
        return self.repetitions * self.click_probability(fidelity)

    def sample_counts(self, fidelity, rng: np.random.Generator):
        """Binomial shot noise over the repetitions."""
        return rng.binomial(self.repetitions, self.click_probability(fidelity))

    def normalized_signal(self, mean_counts):
        """Counts mapped back onto the fidelity scale."""
        span = self.repetitions * (self.p_click_ms0 - self.p_dark)
        if span == 0:
            raise ValueError("Photon model has no contrast")
        return (np.asarray(mean_counts, dtype=float) - self.repetitions * self.p_dark) / span


@dataclass(frozen=True)
class TimeTraceModel(ValueObject):
    """
    Hidden-configuration model of a repetitive parity readout.

    The configuration is redrawn uniformly at scramble events (probability
    per measurement); signal_configurations of n_configurations respond.
    """
    scramble_probability: float = 5e-4
    signal_configurations: int = 1
    n_configurations: int = 288
    bin_size: int = 200
    p_signal_click: float = 0.355
    p_background_click: float = 0.01

    def __post_init__(self):
        DynamicsRules.validate_probability("scramble_probability", self.scramble_probability)
        DynamicsRules.validate_probability("p_signal_click", self.p_signal_click)
        DynamicsRules.validate_probability("p_background_click", self.p_background_click)
        if self.n_configurations < 1:
            raise ValueError("n_configurations must be positive")
        if not 0 <= self.signal_configurations <= self.n_configurations:
            raise ValueError("signal_configurations must lie in [0, n_configurations]")
        if self.bin_size < 1:
            raise ValueError("bin_size must be positive")

    @property
    def signal_fraction(self) -> float:
        return self.signal_configurations / self.n_configurations

    @property
    def bin_threshold(self) -> float:
        """Count midway between background and signal bin means."""
        return self.bin_size * (self.p_signal_click + self.p_background_click) / 2.0

    @classmethod
    def calibrated(cls, high_bin_fraction: float, **kwargs) -> "TimeTraceModel":
        """Model whose signal share of configurations matches a high-bin fraction."""
        n_configurations = kwargs.pop("n_configurations", 288)
        signal = max(1, int(round(high_bin_fraction * n_configurations)))
        return cls(signal_configurations=signal, n_configurations=n_configurations, **kwargs)

    @classmethod
    def from_photon_model(cls, photon: PhotonModel, signal_fidelity: float = 0.5, **kwargs) -> "TimeTraceModel":
        """Signal clicks at the given fidelity; background at the dark rate."""
        return cls(
            p_signal_click=float(photon.click_probability(signal_fidelity)),
            p_background_click=photon.p_dark,
            **kwargs,
        )


@dataclass(frozen=True)
class ReadoutCalibration(ValueObject):
    """Unit counts giving conditional phases pi/2 (spin) and pi (parity)."""
    tau: float
    n_spin: int
    n_parity: int
    phase_spin: float
    phase_parity: float

    @property
    def spin_error(self) -> float:
        return abs(self.phase_spin - math.pi / 2.0) / (math.pi / 2.0)

    @property
    def parity_error(self) -> float:
        return abs(self.phase_parity - math.pi) / math.pi
