"""Noise application service."""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.application.common.context import RunContext
from app.config.constants import CARBON_EQUIVALENT_FIELD_G, FIELD_NOISE_TYPICAL, FIELD_NOISE_WORST
from app.config.settings import NoiseCorrelation
from app.domain.noise.analysis import (
    carbon_bath_sample,
    clock_sensitivity,
    coupling_distribution,
    dephasing_curve,
    field_to_detuning_khz,
    noise_budget,
)
from app.domain.noise.value_objects import FieldNoiseSpec
from app.domain.spectro.couplings import CouplingCalculator, fixed_nitrogen_states

logger = logging.getLogger(__name__)

STREAM_COUPLING = 5
STREAM_DEPHASING = 6
STREAM_BATH = 7

FIELD_NOISE_REGIMES = {"typical": FIELD_NOISE_TYPICAL, "worst": FIELD_NOISE_WORST}


class NoiseService:
    """Field-noise and bath studies at the run's working point."""

    def __init__(self, context: RunContext, map_fn: Callable = map):
        self._context = context
        self._map_fn = map_fn

    def _pair(self) -> Tuple[str, str]:
        return fixed_nitrogen_states(self._context.m_I)

    def coupling_noise(
        self,
        sigma_gauss: Sequence[float],
        correlation: NoiseCorrelation = NoiseCorrelation.CORRELATED,
        n_samples: int = 1000,
        local_axes: Sequence[int] = (2,),
    ) -> Tuple[Dict[str, float], List[Dict[str, float]]]:
        """Summary and per-draw samples of X and the pair splitting under field noise."""
        ctx = self._context
        noise = FieldNoiseSpec.from_sequence(sigma_gauss, correlation, local_axes)
        distribution = coupling_distribution(
            ctx.b, ctx.geometry.require_r23(), ctx.jt, self._pair(), noise,
            ctx.rng(STREAM_COUPLING), n_samples, ctx.constants, self._map_fn,
        )
        samples = [
            {"X_kHz": float(x), "frequency_kHz": float(f)}
            for x, f in zip(distribution.x_samples, distribution.frequency_samples)
        ]
        return distribution.summary(), samples

    def dephasing(
        self,
        x_khz: Optional[float] = None,
        field_sigma_gauss: float = CARBON_EQUIVALENT_FIELD_G,
        max_time_ms: float = 150.0,
        n_times: int = 301,
        n_samples: int = 4000,
        m_s: int = 0,
        z_khz: float = 0.0,
    ) -> Tuple[Dict[str, object], List[Dict[str, float]]]:
        """Pseudo-spin dephasing curve; X defaults to the configured pair's coupling."""
        ctx = self._context
        if x_khz is None:
            x_khz = abs(CouplingCalculator(ctx.b, ctx.constants).flip_flop(ctx.geometry.require_r23(), ctx.jt, *self._pair()))
        sigma_khz = field_to_detuning_khz(field_sigma_gauss, ctx.constants)
        times = np.linspace(0.0, max_time_ms, n_times)
        curve = dephasing_curve(x_khz, sigma_khz, times, ctx.rng(STREAM_DEPHASING), m_s, z_khz, n_samples)
        summary = {
            "X_kHz": x_khz,
            "delta_Z_sigma_kHz": sigma_khz,
            "t2star_ms": curve.t2star,
            "gaussian_t2star_ms": curve.gaussian_t2star,
            "fit_residual": curve.fit_residual,
            "quasi_static": curve.quasi_static,
        }
        rows = [{"time_ms": float(t), "bloch_length": float(v)} for t, v in zip(curve.times, curve.bloch_length)]
        return summary, rows

    def clock_sensitivity(self, x_khz: float, max_ratio: float = 0.1, n_points: int = 11) -> List[Dict[str, float]]:
        return clock_sensitivity(x_khz, np.linspace(0.0, max_ratio * x_khz, n_points)[1:])

    def carbon_bath(
        self,
        concentration: float = 1e-4,
        n_configs: int = 10_000,
        cutoff_khz: float = 10.0,
        radius_nm: float = 15.0,
        lattice_nm: float = 0.35668,
    ) -> Tuple[Dict[str, float], np.ndarray]:
        ctx = self._context
        b = carbon_bath_sample(
            ctx.rng(STREAM_BATH), concentration, n_configs, cutoff_khz, radius_nm, lattice_nm, ctx.constants
        )
        summary = {
            "n_configs": n_configs,
            "mean_kHz": float(b.mean()),
            "median_kHz": float(np.median(b)),
            "std_kHz": float(b.std(ddof=1)) if b.size > 1 else 0.0,
        }
        return summary, b

    def budget(self, include_field_noise: bool = True, n_samples: int = 400) -> List[Dict[str, float]]:
        """Dephasing sources, optionally with correlated field-noise spreads of X."""
        field_noise = {}
        if include_field_noise:
            for name, sigma in FIELD_NOISE_REGIMES.items():
                summary, _ = self.coupling_noise(sigma, NoiseCorrelation.CORRELATED, n_samples)
                field_noise[name] = summary["std_X_kHz"] * 1000.0
        return noise_budget(self._context.constants, field_noise)
