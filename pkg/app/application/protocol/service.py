"""Protocol application service."""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from app.application.common.context import RunContext
from app.domain.dynamics.entities import TimeTrace
from app.domain.protocol.entities import InitializationStats
from app.domain.protocol.initialization import optimize_thresholds
from app.domain.protocol.readout import empirical_fidelity, optimize_readout, readout_fidelity, sample_joint_counts
from app.domain.protocol.value_objects import ReadoutModel

logger = logging.getLogger(__name__)

STREAM_READOUT = 8


def _stats_row(stats: InitializationStats) -> Dict[str, object]:
    theta, lam = stats.scheme.checks[-1] if stats.scheme.checks else (0, 0)
    return {
        "theta": theta,
        "lambda": lam,
        "scheme": stats.scheme.describe(),
        "mean_time_s": stats.mean_time_s,
        "stderr_time_s": stats.stderr_time_s,
        "mean_measurements": stats.mean_measurements,
        "n_successes": stats.n_successes,
        "true_positive_fraction": stats.true_positive_fraction,
    }


class ProtocolService:
    """Optimizes heralded initialization and readout parameters."""

    def __init__(
        self,
        context: RunContext,
        total_readouts: int = 50,
        final_threshold: int = 15,
        measurement_time_s: float = 1e-3,
        overhead_measurements: int = 0,
    ):
        self._context = context
        self._total = total_readouts
        self._final = final_threshold
        self._measurement_time_s = measurement_time_s
        self._overhead = overhead_measurements

    def optimize_initialization(
        self,
        trace: TimeTrace,
        theta_set: Sequence[int] = (3, 5, 7, 9),
        lambda_max: int = 8,
        n_successes: int = 200,
        second_check: Optional[Tuple[int, int]] = (10, 3),
    ) -> Tuple[Dict[str, object], List[Dict[str, object]]]:
        """Optimum report and the full (theta, lambda) time surface."""
        optimum = optimize_thresholds(
            trace, self._context.seed, theta_set, lambda_max, n_successes,
            self._total, self._final, self._measurement_time_s, self._overhead, second_check,
        )
        report = {
            "baseline": _stats_row(optimum.baseline),
            "best": _stats_row(optimum.best),
            "speedup": optimum.speedup,
            "second_check": _stats_row(optimum.second_check) if optimum.second_check else None,
            "trace_length": len(trace),
            "synthetic_trace": trace.synthetic,
        }
        return report, [_stats_row(stats) for stats in optimum.surface]

    def optimize_readout(
        self,
        model: ReadoutModel,
        n_max: int = 10,
        shots: int = 0,
    ) -> Tuple[Dict[str, object], List[Dict[str, object]]]:
        """
        Exact (n, T) optimum with the per-n best thresholds; with shots > 0
        each per-n optimum is also evaluated on sampled joint counts.
        """
        optimum = optimize_readout(model, range(1, n_max + 1))
        rows = []
        data = sample_joint_counts(model, self._context.rng(STREAM_READOUT), shots, n_max) if shots else None
        for n, t, f in optimum.best_per_n:
            row = {"n": n, "T": t, "F_exact": f}
            if data is not None:
                f_mc, se = empirical_fidelity(data, n, t, model.n_a, model.n_b)
                row.update({"F_sampled": f_mc, "F_sampled_stderr": se})
            rows.append(row)
        report = dict(optimum.to_dict())
        report["model"] = {
            "p_a": model.p_a, "p_b": model.p_b, "prior_a": model.prior_a,
            "contrast_decay": model.contrast_decay, "k": model.k, "N_a": model.n_a, "N_b": model.n_b,
        }
        return report, rows

    @staticmethod
    def fidelity(model: ReadoutModel, n: int, threshold: int) -> float:
        return readout_fidelity(model, n, threshold)
