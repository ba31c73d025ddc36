"""Imaging rules and limits."""

import math

# Radius floor (nm) applied to trial vectors inside residual evaluation
MIN_RADIUS_NM = 0.1

# Parameters per fitted vector
VECTOR_PARAMETERS = 3

# Relative RSS window within which permutations count as tied
RSS_TIE_RTOL = 1e-9


class ImagingRules:
    """Validation rules for fit inputs."""

    @staticmethod
    def validate_radius_box(r_min: float, r_max: float) -> None:
        if not 0 < r_min < r_max:
            raise ValueError(f"Radius box must satisfy 0 < r_min < r_max, got ({r_min}, {r_max})")

    @staticmethod
    def validate_measurement(value: float) -> None:
        if not math.isfinite(value):
            raise ValueError(f"Measured coupling must be finite, got {value}")

    @staticmethod
    def is_underdetermined(n_residuals: int) -> bool:
        return n_residuals < VECTOR_PARAMETERS
