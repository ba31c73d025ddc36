"""RF simulation rules and thresholds."""

import numpy as np

from .exceptions import IntegrationAccuracyError

MIN_STEPS_PER_PERIOD = 40
RETENTION_THRESHOLD = 0.95
NORM_TOLERANCE = 1e-6

# Listed drive frequencies are moved onto the nearest simulated gap within this window
SNAP_TOLERANCE_MHZ = 0.5
SNAP_WARNING_MHZ = 0.1

# Simulated transitions are anchored to listed lines within this window
ANCHOR_TOLERANCE_MHZ = 0.1

# Largest tolerated misfit when the anchored lines over-constrain the levels
ANCHOR_RESIDUAL_MHZ = 1e-6

# Only listed lines this close to a drive are anchored for that drive
ANCHOR_WINDOW_MHZ = 1.0

# Observed frequencies match a table row within this window
FREQUENCY_MATCH_MHZ = 5e-4


class RFRules:
    """Validation rules for RF integration."""

    @staticmethod
    def validate_steps(steps_per_period: int) -> None:
        if steps_per_period < MIN_STEPS_PER_PERIOD:
            raise ValueError(
                f"At least {MIN_STEPS_PER_PERIOD} steps per RF period are required, got {steps_per_period}"
            )

    @staticmethod
    def validate_unitarity(propagator: np.ndarray, tolerance: float = NORM_TOLERANCE) -> None:
        """
        Validate that every column keeps unit norm.

        Raises:
            IntegrationAccuracyError: If any column norm drifts beyond tolerance
        """
        norms = np.linalg.norm(propagator, axis=0)
        drift = float(np.max(np.abs(norms - 1.0)))
        if drift > tolerance:
            raise IntegrationAccuracyError(
                "State norm drifted during RF integration",
                details={"norm_drift": drift, "tolerance": tolerance}
            )
