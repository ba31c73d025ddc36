"""Imaging application service."""

import logging
from dataclasses import asdict
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from app.application.common.context import RunContext
from app.config.constants import REFERENCE_FLIP_FLOP_CANDIDATES, REFERENCE_RAMSEY_FREQUENCIES
from app.domain.imaging.fitting import benchmark, fit_nv_position, permutation_search, symmetry_orbit
from app.domain.imaging.interfaces import ILeastSquaresSolver
from app.domain.imaging.value_objects import CouplingObservation, ObservationKind, StatePair
from app.domain.spectro.couplings import implied_detuning
from .dto import FitReportDTO, PermutationRowDTO

logger = logging.getLogger(__name__)

STREAM_FIT = 3
STREAM_BENCHMARK = 4


def reference_observations(include_detuning: bool = True) -> List[CouplingObservation]:
    """
    Observations built from the tabulated resonances: X is the m_s = 0
    pseudo-spin frequency and Z follows from the m_s = -1 partner.
    """
    observations = []
    for tau, (jt, candidates) in sorted(REFERENCE_FLIP_FLOP_CANDIDATES.items()):
        f_ms1, f_ms0 = REFERENCE_RAMSEY_FREQUENCIES[tau]
        observations.append(CouplingObservation(tau, jt, candidates, f_ms0, ObservationKind.X))
        if include_detuning and f_ms1 >= f_ms0:
            observations.append(CouplingObservation(tau, jt, candidates, implied_detuning(f_ms0, f_ms1), ObservationKind.Z))
    return observations


class ImagingService:
    """Reconstructs defect geometry from coupling observations."""

    def __init__(
        self,
        context: RunContext,
        solver: ILeastSquaresSolver,
        map_fn: Callable = map,
        r_bounds: Tuple[float, float] = (1.0, 30.0),
        position_bounds: Tuple[float, float] = (2.0, 15.0),
    ):
        self._context = context
        self._solver = solver
        self._map_fn = map_fn
        self._r_bounds = r_bounds
        self._position_bounds = position_bounds

    def fit(
        self,
        observations: Sequence[CouplingObservation],
        n_starts_p1: int = 300,
        n_starts_nv: int = 400,
    ) -> FitReportDTO:
        """
        Permutation search over the X observations, then the NV position with
        r23 fixed to the best P1-P1 solution.

        Detuning observations take the state pair chosen for the X
        observation with the same tau when it is among their candidates.
        """
        ctx = self._context
        rng = ctx.rng(STREAM_FIT)
        x_obs = [o for o in observations if o.kind is ObservationKind.X]
        nv_obs = [o for o in observations if o.kind.needs_nv]
        report = FitReportDTO()
        if not x_obs:
            raise ValueError("At least one X observation is needed to place the P1 pair")

        ranking = permutation_search(
            ctx.b, x_obs, self._solver, rng, n_starts_p1, self._r_bounds, ctx.constants, self._map_fn,
        )
        report.permutations = [
            PermutationRowDTO(
                index=item.index,
                assignment=";".join(f"{a}/{b}" for a, b in item.assignment),
                rss_kHz2=item.rss,
                tied=item.tied,
                r23_nm_rad_rad=item.fit.r23.to_list(),
            )
            for item in ranking
        ]
        best = ranking[0].fit
        report.p1_fit = best.to_dict()

        if nv_obs:
            chosen = {o.tau: pair for o, pair in zip(x_obs, best.assignment)}
            assignment = [
                chosen[o.tau] if chosen.get(o.tau) in o.candidates else o.candidates[0]
                for o in nv_obs
            ]
            nv_fit = fit_nv_position(
                ctx.b, nv_obs, best.r23, self._solver, rng, n_starts_nv,
                assignment=assignment, r_bounds=self._r_bounds, constants=ctx.constants, map_fn=self._map_fn,
            )
            report.nv_fit = nv_fit.to_dict()
            report.equivalent_geometries = [
                {"r12_nm": r12.tolist(), "r23_nm": r23.tolist()}
                for r12, r23 in symmetry_orbit(nv_fit.r12.cartesian, best.r23.cartesian)
            ]
        return report

    def benchmark(
        self,
        n_positions: int = 10,
        n_noisy_sets: int = 200,
        noise_std: float = 0.002,
        n_starts_p1: int = 300,
        n_starts_nv: int = 400,
        template: Optional[Sequence[Tuple[str, StatePair]]] = None,
    ) -> List[Dict[str, object]]:
        """Error table of the synthetic reconstruction benchmark."""
        ctx = self._context
        if template is None:
            template = [(jt, pairs[0]) for _, (jt, pairs) in sorted(REFERENCE_FLIP_FLOP_CANDIDATES.items())]
        rows = benchmark(
            ctx.b, template, self._solver, ctx.rng(STREAM_BENCHMARK), n_positions, n_noisy_sets, noise_std,
            n_starts_p1, n_starts_nv, self._r_bounds, self._position_bounds, ctx.constants, self._map_fn,
        )
        return [
            {
                "position": row.position_index,
                "r12_true_nm": row.r12_true,
                "r23_true_nm": row.r23_true,
                "p1_error_mean_nm": row.p1_error_mean,
                "p1_error_median_nm": row.p1_error_median,
                "nv_error_mean_nm": row.nv_error_mean,
                "nv_error_median_nm": row.nv_error_median,
                "nv_error_max_nm": row.nv_error_max,
                "p1_axis_errors_nm": row.p1_axis_errors,
                "nv_axis_errors_nm": row.nv_axis_errors,
                "n_noisy_sets": row.n_noisy_sets,
            }
            for row in rows
        ]

    @staticmethod
    def report_dict(report: FitReportDTO) -> Dict[str, object]:
        return asdict(report)
