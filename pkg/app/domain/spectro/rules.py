"""Spectroscopy rules and tolerances."""

import math

from .exceptions import NoResonanceError, SpectroError

# Top-two overlaps closer than this make a label ambiguous
LABEL_TIE_TOLERANCE = 1e-6

# Minimum weight of an eigenvector on a flip-flop target state
FLIP_FLOP_MIN_OVERLAP = 0.75

# Relative window for counting a configuration as resonant with the target
RESONANCE_RTOL = 0.01

# Two JT axes are equivalent when their |cos| to the field agree this closely
AXIS_EQUIVALENCE_TOL = 1e-6


class SpectroRules:
    """Validation rules for spectroscopic quantities."""

    @staticmethod
    def validate_labels(labels, dim: int) -> None:
        """Basis labels must be unique and match the matrix dimension."""
        if len(labels) != dim:
            raise ValueError(f"Expected {dim} basis labels, got {len(labels)}")
        if len(set(labels)) != len(labels):
            raise ValueError("Basis labels must be unique")

    @staticmethod
    def validate_coupling(x_khz: float) -> None:
        """
        Validate that a coupling supports a decoupling resonance.

        Raises:
            NoResonanceError: If the coupling is zero or not finite
        """
        if not math.isfinite(x_khz) or x_khz == 0.0:
            raise NoResonanceError(
                "Flip-flop coupling must be nonzero for a resonance",
                details={"X_kHz": x_khz}
            )

    @staticmethod
    def validate_frequency_pair(f_ms0: float, f_ms1: float) -> None:
        """
        The m_s = -1 pseudo-spin frequency can never be below the m_s = 0 one.

        Raises:
            SpectroError: If f_ms1 < f_ms0
        """
        if f_ms0 < 0 or f_ms1 < f_ms0:
            raise SpectroError(
                "Frequency at m_s = -1 must be at least the m_s = 0 frequency",
                details={"f_ms0_kHz": f_ms0, "f_ms1_kHz": f_ms1}
            )
