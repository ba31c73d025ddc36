"""Spin model domain exceptions."""

from app.domain.common.exceptions import DomainException


class SpinModelError(DomainException):
    """Base exception for spin model domain."""
    pass


class InvalidSpinError(SpinModelError):
    """Spin quantum number is not supported."""
    pass


class InvalidSeparationError(SpinModelError):
    """Separation vector has zero length."""
    pass


class MissingGeometryError(SpinModelError):
    """Geometry lacks a vector needed by the requested subsystem."""
    pass


class NonHermitianOperatorError(SpinModelError):
    """Matrix is not Hermitian within tolerance."""
    pass
