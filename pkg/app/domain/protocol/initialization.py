"""
Emulated heralded initialization on a recorded or synthetic parity trace.

Each attempt starts at a random trace position, runs the scheme's checks
on consecutive bins and, if all pass, reads the full window. Failed
attempts jump to a new random position.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.domain.dynamics.entities import TimeTrace
from .entities import InitializationStats, ThresholdOptimum
from .exceptions import InsufficientDataError
from .rules import ATTEMPT_BATCH, MAX_ATTEMPTS, ProtocolRules
from .value_objects import ThresholdScheme

logger = logging.getLogger(__name__)


def _attempt_table(outcomes: np.ndarray, scheme: ThresholdScheme) -> Tuple[np.ndarray, np.ndarray]:
    """Per start index: consumed measurements and success flag."""
    window = scheme.total_readouts
    ProtocolRules.validate_trace_length(outcomes.size, window)
    prefix = np.concatenate([[0], np.cumsum(outcomes, dtype=np.int64)])
    starts = np.arange(outcomes.size - window + 1)

    cost = np.full(starts.size, window, dtype=np.int64)
    alive = np.ones(starts.size, dtype=bool)
    offset = 0
    for theta, lam in scheme.checks:
        counts = prefix[starts + offset + theta] - prefix[starts + offset]
        offset += theta
        failed = alive & (counts < lam)
        cost[failed] = offset
        alive &= ~failed

    window_counts = prefix[starts + window] - prefix[starts]
    success = alive & (window_counts >= scheme.final_threshold)
    return cost, success


def sample_initialization_time(
    trace: TimeTrace,
    scheme: ThresholdScheme,
    n_successes: int,
    rng: np.random.Generator,
    measurement_time_s: float = 1e-3,
    overhead_measurements: int = 0,
) -> InitializationStats:
    """
    Monte-Carlo time per successful initialization.

    Every attempt costs its consumed measurements plus overhead_measurements.

    Raises:
        InsufficientDataError: If the trace is shorter than one window or
            no attempt succeeds within the attempt limit
    """
    if n_successes < 1:
        raise ValueError("n_successes must be positive")
    cost, success = _attempt_table(trace.outcomes, scheme)
    if not success.any():
        raise InsufficientDataError(
            "Trace holds no window passing the scheme",
            details={"scheme": scheme.describe(), "trace_length": len(trace)}
        )

    per_success: List[int] = []
    success_starts: List[int] = []
    running = 0
    attempts = 0
    while len(per_success) < n_successes:
        if attempts >= MAX_ATTEMPTS:
            raise InsufficientDataError(
                "Attempt limit reached before collecting the requested successes",
                details={"attempts": attempts, "successes": len(per_success), "scheme": scheme.describe()}
            )
        starts = rng.integers(0, cost.size, size=ATTEMPT_BATCH)
        attempts += ATTEMPT_BATCH
        batch_cost = cost[starts] + overhead_measurements
        for start, spent, ok in zip(starts, batch_cost, success[starts]):
            running += int(spent)
            if ok:
                per_success.append(running)
                success_starts.append(int(start))
                running = 0
                if len(per_success) == n_successes:
                    break

    spent = np.array(per_success, dtype=float)
    true_positive = None
    if trace.signal_mask is not None:
        window_end = np.array(success_starts) + scheme.total_readouts - 1
        true_positive = float(np.mean(np.asarray(trace.signal_mask)[window_end]))

    stats = InitializationStats(
        scheme=scheme,
        n_successes=n_successes,
        mean_measurements=float(spent.mean()),
        std_measurements=float(spent.std(ddof=1)) if spent.size > 1 else 0.0,
        mean_time_s=float(spent.mean()) * measurement_time_s,
        std_time_s=(float(spent.std(ddof=1)) if spent.size > 1 else 0.0) * measurement_time_s,
        attempts=attempts,
        true_positive_fraction=true_positive,
    )
    logger.debug(f"Scheme [{scheme.describe()}]: {stats.mean_time_s:.4f} s per success")
    return stats


def optimize_thresholds(
    trace: TimeTrace,
    seed: int,
    theta_set: Sequence[int] = (3, 5, 7, 9),
    lambda_max: int = 8,
    n_successes: int = 200,
    total_readouts: int = 50,
    final_threshold: int = 15,
    measurement_time_s: float = 1e-3,
    overhead_measurements: int = 0,
    second_check: Optional[Tuple[int, int]] = None,
) -> ThresholdOptimum:
    """
    Grid search over single checks (theta, lambda).

    Every cell reuses the same seed, so a lambda = 0 cell reproduces the
    no-check baseline sample for sample. Ties go to the smaller theta, then
    the smaller lambda. Cells with lambda > theta are skipped.
    """
    def run(scheme: ThresholdScheme) -> InitializationStats:
        return sample_initialization_time(
            trace, scheme, n_successes, np.random.default_rng(seed),
            measurement_time_s, overhead_measurements,
        )

    base_scheme = ThresholdScheme((), total_readouts, final_threshold)
    baseline = run(base_scheme)
    surface = []
    best = baseline
    for theta in sorted(theta_set):
        for lam in range(0, lambda_max + 1):
            if lam > theta:
                continue
            stats = run(base_scheme.with_check(theta, lam))
            surface.append(stats)
            if stats.mean_time_s < best.mean_time_s:
                best = stats

    extended = None
    if second_check is not None and best.scheme.checks:
        theta2, lam2 = second_check
        extended = run(best.scheme.with_check(theta2, lam2))

    optimum = ThresholdOptimum(best=best, baseline=baseline, surface=surface, second_check=extended)
    logger.info(
        f"Initialization optimum [{best.scheme.describe()}]: {best.mean_time_s:.4f} s "
        f"vs {baseline.mean_time_s:.4f} s without checks ({optimum.speedup:.1f}x)"
    )
    return optimum
