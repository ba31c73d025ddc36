"""Spectroscopy application service."""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from app.application.common.context import RunContext
from app.config.constants import REFERENCE_RAMSEY_FREQUENCIES
from app.domain.spectro.couplings import (
    configuration_table,
    implied_detuning,
    ramsey_table,
    resonant_configuration_fraction,
    resonant_tau,
)

logger = logging.getLogger(__name__)


class SpectroService:
    """Builds coupling tables for the configured field and geometry."""

    def __init__(self, context: RunContext):
        self._context = context

    def constants_report(self) -> Dict[str, object]:
        """Physical constants and working point of the run."""
        ctx = self._context
        report = dict(ctx.constants.to_dict())
        report["field_G"] = ctx.b.vector.tolist()
        report["r12_nm_rad_rad"] = ctx.geometry.r12.to_list() if ctx.geometry.r12 else None
        report["r23_nm_rad_rad"] = ctx.geometry.r23.to_list() if ctx.geometry.r23 else None
        return report

    def couplings_table(self, state_pairs: Optional[Sequence[Tuple[str, str]]] = None) -> List[Dict[str, float]]:
        """X, Z, D1, D2 and pseudo-spin frequencies for 4 JT x 3 m_I configurations."""
        ctx = self._context
        rows = configuration_table(ctx.b, ctx.geometry, state_pairs, ctx.constants)
        logger.info(f"Computed couplings for {len(rows)} configurations")
        return ramsey_table(rows)

    def reference_resonance_check(self) -> List[Dict[str, float]]:
        """Predicted decoupling resonances of the tabulated pseudo-spin frequencies."""
        rows = []
        for tau_observed, (f_ms1, f_ms0) in sorted(REFERENCE_RAMSEY_FREQUENCIES.items()):
            z = implied_detuning(f_ms0, f_ms1) if f_ms1 >= f_ms0 else 0.0
            tau = resonant_tau(f_ms0, z)
            rows.append({
                "tau_observed_us": tau_observed,
                "f_ms1_kHz": f_ms1,
                "f_ms0_kHz": f_ms0,
                "Z_implied_kHz": z,
                "tau_predicted_us": tau,
                "relative_error": abs(tau - tau_observed) / tau_observed,
            })
        return rows

    def resonant_fraction(self, target: Tuple[str, int] = ("A", 0), rtol: float = 0.01) -> Dict[str, float]:
        ctx = self._context
        return resonant_configuration_fraction(ctx.b, ctx.geometry.r23, target, rtol, ctx.constants)
