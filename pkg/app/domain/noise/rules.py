"""Noise rules and limits."""

import math

from .exceptions import InvalidNoiseInputError

# Spin-1/2 variance of a randomly oriented nuclear spin projection
NUCLEAR_SPIN_VARIANCE = 0.25

# Ratio below which the pseudo-spin sensitivity counts as quadratic
CLOCK_REGIME_MAX_RATIO = 0.1

# Envelope level defining the dephasing time
DEPHASING_LEVEL = math.exp(-1.0)


class NoiseRules:
    """Validation rules for noise inputs."""

    @staticmethod
    def validate_positive(name: str, value: float) -> None:
        if not (math.isfinite(value) and value > 0):
            raise InvalidNoiseInputError(
                f"{name} must be positive",
                details={name: value}
            )

    @staticmethod
    def validate_quadrature(total: float, component: float) -> None:
        if total < 0 or component < 0:
            raise InvalidNoiseInputError(
                "Noise amplitudes cannot be negative",
                details={"total": total, "component": component}
            )
        if component > total:
            raise InvalidNoiseInputError(
                "Component noise exceeds the total",
                details={"total": total, "component": component}
            )

    @staticmethod
    def validate_concentration(concentration: float) -> None:
        if not 0 < concentration < 1:
            raise InvalidNoiseInputError(
                "Concentration must lie in (0, 1)",
                details={"concentration": concentration}
            )
