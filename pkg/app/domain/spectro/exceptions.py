"""Spectroscopy domain exceptions."""

from app.domain.common.exceptions import DomainException


class SpectroError(DomainException):
    """Base exception for spectroscopy domain."""
    pass


class DegenerateLabelingError(SpectroError):
    """Eigenvector overlaps are too close to assign a unique label."""
    pass


class NoFlipFlopError(SpectroError):
    """Requested states do not form a coupled flip-flop pair."""
    pass


class NoResonanceError(SpectroError):
    """No decoupling resonance exists for a zero coupling."""
    pass
