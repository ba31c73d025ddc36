"""Application-level exceptions."""

from app.domain.common.exceptions import DomainException


class ConfigurationError(DomainException):
    """Run configuration is unreadable, inconsistent or incomplete."""
    pass
