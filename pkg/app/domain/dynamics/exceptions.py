"""Dynamics domain exceptions."""

from app.domain.common.exceptions import DomainException


class DynamicsError(DomainException):
    """Base exception for dynamics domain."""
    pass


class NonUnitStateError(DynamicsError):
    """Initial state is not normalized."""
    pass


class NoConditionalPhaseError(DynamicsError):
    """Sequence accumulates no NV-conditional phase."""
    pass
