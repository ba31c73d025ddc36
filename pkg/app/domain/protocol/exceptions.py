"""Protocol domain exceptions."""

from app.domain.common.exceptions import DomainException


class ProtocolError(DomainException):
    """Base exception for protocol domain."""
    pass


class InsufficientDataError(ProtocolError):
    """The trace is too short or holds no successful window."""
    pass


class UndefinedFidelityError(ProtocolError):
    """A conditioning event of the readout fidelity has no support."""
    pass
