"""Dynamics rules and tolerances."""

import numpy as np

from .exceptions import NonUnitStateError

STATE_NORM_TOLERANCE = 1e-9
UNITARITY_TOLERANCE = 1e-9

# Calibration accepts phases within this fraction of the target
PHASE_RTOL = 0.05
MAX_CALIBRATION_UNITS = 400


class DynamicsRules:
    """Validation rules for propagated states."""

    @staticmethod
    def validate_unit_state(state: np.ndarray) -> np.ndarray:
        """
        Validate a normalized state vector.

        Raises:
            NonUnitStateError: If the norm deviates from one
        """
        state = np.asarray(state, dtype=complex)
        norm = float(np.linalg.norm(state))
        if abs(norm - 1.0) > STATE_NORM_TOLERANCE:
            raise NonUnitStateError(
                "Initial state must be normalized",
                details={"norm": norm, "tolerance": STATE_NORM_TOLERANCE}
            )
        return state

    @staticmethod
    def validate_probability(name: str, value: float) -> None:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
