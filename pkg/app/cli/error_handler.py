"""Exit-code mapping and error records for the command line."""

import json
import logging
import sys
from typing import TextIO

from app.application.common.exceptions import ConfigurationError
from app.domain.common.exceptions import DomainException
from app.domain.dynamics.exceptions import DynamicsError, NoConditionalPhaseError, NonUnitStateError
from app.domain.imaging.exceptions import FitFailureError, ImagingError
from app.domain.noise.exceptions import InvalidNoiseInputError, NoiseError
from app.domain.protocol.exceptions import InsufficientDataError, ProtocolError, UndefinedFidelityError
from app.domain.rf.exceptions import InconsistentObservationError, IntegrationAccuracyError, RFSimulationError
from app.domain.spectro.exceptions import DegenerateLabelingError, NoFlipFlopError, NoResonanceError, SpectroError
from app.domain.spins.exceptions import (
    InvalidSeparationError,
    InvalidSpinError,
    MissingGeometryError,
    NonHermitianOperatorError,
    SpinModelError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_UNEXPECTED = 3

# Map exceptions to exit codes; lookup walks the class hierarchy
EXIT_CODE_MAP = {
    # Configuration
    ConfigurationError: EXIT_USAGE,

    # Spin model
    InvalidSpinError: EXIT_DOMAIN,
    InvalidSeparationError: EXIT_DOMAIN,
    MissingGeometryError: EXIT_DOMAIN,
    NonHermitianOperatorError: EXIT_DOMAIN,
    SpinModelError: EXIT_DOMAIN,

    # Spectroscopy
    DegenerateLabelingError: EXIT_DOMAIN,
    NoFlipFlopError: EXIT_DOMAIN,
    NoResonanceError: EXIT_DOMAIN,
    SpectroError: EXIT_DOMAIN,

    # Dynamics
    NonUnitStateError: EXIT_DOMAIN,
    NoConditionalPhaseError: EXIT_DOMAIN,
    DynamicsError: EXIT_DOMAIN,

    # RF
    IntegrationAccuracyError: EXIT_DOMAIN,
    InconsistentObservationError: EXIT_DOMAIN,
    RFSimulationError: EXIT_DOMAIN,

    # Imaging
    FitFailureError: EXIT_DOMAIN,
    ImagingError: EXIT_DOMAIN,

    # Noise
    InvalidNoiseInputError: EXIT_DOMAIN,
    NoiseError: EXIT_DOMAIN,

    # Protocol
    InsufficientDataError: EXIT_DOMAIN,
    UndefinedFidelityError: EXIT_DOMAIN,
    ProtocolError: EXIT_DOMAIN,
}


def exit_code_for(exc: BaseException) -> int:
    for cls in type(exc).__mro__:
        if cls in EXIT_CODE_MAP:
            return EXIT_CODE_MAP[cls]
    if isinstance(exc, DomainException):
        return EXIT_DOMAIN
    if isinstance(exc, (ValueError, FileNotFoundError)):
        return EXIT_USAGE
    return EXIT_UNEXPECTED


def error_record(exc: BaseException) -> dict:
    if isinstance(exc, DomainException):
        return exc.to_record()
    if isinstance(exc, (ValueError, FileNotFoundError)):
        return {"error": exc.__class__.__name__, "message": str(exc), "details": {}}
    return {"error": "InternalError", "message": "An unexpected error occurred", "details": {}}


def handle_exception(exc: BaseException, command: str = "", stream: TextIO = None) -> int:
    """Log the failure, print a JSON error record and return the exit code."""
    code = exit_code_for(exc)
    if isinstance(exc, DomainException):
        logger.warning(
            f"Domain exception: {exc.__class__.__name__}",
            extra={
                "exception": exc.__class__.__name__,
                "error_message": exc.message,
                "details": exc.details,
                "command": command,
            }
        )
    elif code == EXIT_UNEXPECTED:
        logger.error("Unexpected error", exc_info=exc, extra={"command": command})
    else:
        logger.warning(f"Invalid input: {exc}", extra={"command": command})

    stream = stream or sys.stderr
    stream.write(json.dumps(error_record(exc), sort_keys=True, default=str) + "\n")
    return code
