"""Noise domain exceptions."""

from app.domain.common.exceptions import DomainException


class NoiseError(DomainException):
    """Base exception for noise domain."""
    pass


class InvalidNoiseInputError(NoiseError):
    """A dephasing time, noise amplitude or concentration is out of range."""
    pass
