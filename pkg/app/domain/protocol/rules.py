"""Protocol rules and limits."""

from typing import Sequence, Tuple

from .exceptions import InsufficientDataError

# Attempts drawn per batch when emulating initialization
ATTEMPT_BATCH = 4096

# Attempts after which a scheme counts as never succeeding
MAX_ATTEMPTS = 5_000_000

# Largest n for exact enumeration of readout counts
MAX_EXACT_READOUTS = 200


class ProtocolRules:
    """Validation rules for protocol inputs."""

    @staticmethod
    def validate_checks(checks: Sequence[Tuple[int, int]], total: int) -> None:
        if sum(theta for theta, _ in checks) > total:
            raise ValueError(f"Check bins {list(checks)} exceed the {total} readouts of the window")
        for theta, lam in checks:
            if theta < 1:
                raise ValueError(f"Check bin size must be positive, got {theta}")
            if not 0 <= lam <= theta:
                raise ValueError(f"Check threshold must lie in [0, {theta}], got {lam}")

    @staticmethod
    def validate_trace_length(length: int, window: int) -> None:
        if length < window:
            raise InsufficientDataError(
                "Trace is shorter than one readout window",
                details={"trace_length": length, "window": window}
            )
