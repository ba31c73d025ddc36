"""RF simulation domain exceptions."""

from app.domain.common.exceptions import DomainException


class RFSimulationError(DomainException):
    """Base exception for RF simulation domain."""
    pass


class IntegrationAccuracyError(RFSimulationError):
    """Propagated state norm drifted beyond tolerance."""
    pass


class InconsistentObservationError(RFSimulationError):
    """No configuration reproduces the observed response pattern."""
    pass
