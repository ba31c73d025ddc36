"""Imaging domain exceptions."""

from app.domain.common.exceptions import DomainException


class ImagingError(DomainException):
    """Base exception for imaging domain."""
    pass


class FitFailureError(ImagingError):
    """No fit start converged to a finite solution."""
    pass
