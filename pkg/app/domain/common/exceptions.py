"""Base domain exceptions."""


class DomainException(Exception):
    """Base exception for all toolkit errors; details stay machine-readable."""

    def __init__(self, message: str, details: dict = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)

    def to_record(self) -> dict:
        return {"error": self.__class__.__name__, "message": self.message, "details": self.details}
