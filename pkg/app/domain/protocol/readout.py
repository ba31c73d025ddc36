"""
Combined initialization and readout fidelity.

F(n, T) = 1/2 P(N(n) >= T | N(k) > N_a) + 1/2 P(N(n) < T | N(k) < N_b),
evaluated exactly under a ReadoutModel or empirically from joint counts.
"""

import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .entities import JointCounts
from .exceptions import UndefinedFidelityError
from .rules import MAX_EXACT_READOUTS
from .value_objects import ReadoutModel, ReadoutOptimum

logger = logging.getLogger(__name__)


def count_distribution(probabilities: Sequence[float]) -> np.ndarray:
    """Poisson-binomial distribution of the number of clicks."""
    dist = np.array([1.0])
    for p in probabilities:
        dist = np.convolve(dist, [1.0 - p, p])
    return dist


def _herald_weights(model: ReadoutModel) -> Tuple[np.ndarray, np.ndarray]:
    """Joint probabilities P(state, herald) for the a and b heralds, ordered (a, b)."""
    priors = np.array([model.prior_a, 1.0 - model.prior_a])
    p_click = np.array([model.p_a, model.p_b])
    herald_a = stats.binom.sf(model.n_a, model.k, p_click)
    herald_b = stats.binom.cdf(model.n_b - 1, model.k, p_click) if model.n_b > 0 else np.zeros(2)
    return priors * herald_a, priors * herald_b


def readout_fidelity(model: ReadoutModel, n: int, threshold: int) -> float:
    """
    Exact fidelity by enumerating the readout count distribution.

    Raises:
        UndefinedFidelityError: If a heralding event has zero probability
    """
    if not 0 < n <= MAX_EXACT_READOUTS:
        raise ValueError(f"n must lie in [1, {MAX_EXACT_READOUTS}], got {n}")
    weight_a, weight_b = _herald_weights(model)
    if weight_a.sum() <= 0 or weight_b.sum() <= 0:
        raise UndefinedFidelityError(
            "A heralding event has zero probability",
            details={"P_herald_a": float(weight_a.sum()), "P_herald_b": float(weight_b.sum())}
        )
    high = np.array([
        count_distribution(model.readout_probabilities(state, n))[threshold:].sum()
        for state in (True, False)
    ])
    p_high_given_a = float(weight_a @ high / weight_a.sum())
    p_low_given_b = float(weight_b @ (1.0 - high) / weight_b.sum())
    return min(1.0, max(0.0, 0.5 * p_high_given_a + 0.5 * p_low_given_b))


def sample_joint_counts(
    model: ReadoutModel,
    rng: np.random.Generator,
    shots: int,
    n_max: int,
) -> JointCounts:
    """Draw heralding counts and per-readout clicks for independent shots."""
    state_a = rng.random(shots) < model.prior_a
    p_click = np.where(state_a, model.p_a, model.p_b)
    init_counts = rng.binomial(model.k, p_click)
    probabilities = np.where(
        state_a[:, None],
        np.array(model.readout_probabilities(True, n_max))[None, :],
        np.array(model.readout_probabilities(False, n_max))[None, :],
    )
    readouts = (rng.random((shots, n_max)) < probabilities).astype(np.int8)
    return JointCounts(init_counts=init_counts, readouts=readouts, state_a=state_a)


def empirical_fidelity(
    data: JointCounts,
    n: int,
    threshold: int,
    n_a: int,
    n_b: int,
) -> Tuple[float, float]:
    """
    Fidelity and its binomial standard error from joint count data.

    Raises:
        UndefinedFidelityError: If no shot satisfies a heralding condition
    """
    counts = data.readout_counts(n)
    herald_a = data.init_counts > n_a
    herald_b = data.init_counts < n_b
    if not herald_a.any() or not herald_b.any():
        raise UndefinedFidelityError(
            "No shot satisfies a heralding condition",
            details={"herald_a": int(herald_a.sum()), "herald_b": int(herald_b.sum())}
        )
    p_high = float(np.mean(counts[herald_a] >= threshold))
    p_low = float(np.mean(counts[herald_b] < threshold))
    se = 0.5 * np.sqrt(p_high * (1 - p_high) / herald_a.sum() + p_low * (1 - p_low) / herald_b.sum())
    return 0.5 * p_high + 0.5 * p_low, float(se)


def optimize_readout(
    source: Union[ReadoutModel, JointCounts],
    n_range: Sequence[int],
    threshold_range: Optional[Sequence[int]] = None,
    n_a: Optional[int] = None,
    n_b: Optional[int] = None,
) -> ReadoutOptimum:
    """
    Grid argmax of F over (n, T); ties go to the smaller n, then the smaller T.

    source is a ReadoutModel (exact) or JointCounts (empirical; n_a and n_b
    required). Without a threshold range every T in [0, n + 1] is tried.
    """
    if isinstance(source, JointCounts) and (n_a is None or n_b is None):
        raise ValueError("Empirical optimization needs the heralding thresholds n_a and n_b")

    best_per_n = []
    best = None
    for n in sorted(n_range):
        thresholds = sorted(threshold_range) if threshold_range is not None else range(0, n + 2)
        row_best = None
        for t in thresholds:
            if isinstance(source, ReadoutModel):
                f = readout_fidelity(source, n, t)
            else:
                f, _ = empirical_fidelity(source, n, t, n_a, n_b)
            if row_best is None or f > row_best[2]:
                row_best = (n, t, f)
        best_per_n.append(row_best)
        if best is None or row_best[2] > best[2]:
            best = row_best

    n, t, f = best
    logger.info(f"Readout optimum: n = {n}, T = {t}, F = {f:.4f}")
    return ReadoutOptimum(n=n, threshold=t, fidelity=f, best_per_n=tuple(best_per_n))
