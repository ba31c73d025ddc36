"""
Geometry reconstruction from measured effective couplings.

Vectors are fitted in Cartesian coordinates from random starts drawn in a
spherical box; the lowest-RSS converged start wins. Residuals are
|model| - measured in kHz.
"""

import logging
from itertools import product
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.domain.spectro.couplings import CouplingCalculator
from app.domain.spectro.exceptions import SpectroError
from app.domain.spins.exceptions import SpinModelError
from app.domain.spins.value_objects import DefectGeometry, MagneticField, PhysicalConstants, SphericalVector
from app.domain.common.exceptions import DomainException
from .entities import BenchmarkRow, PermutationResult
from .exceptions import FitFailureError
from .interfaces import ILeastSquaresSolver
from .rules import MIN_RADIUS_NM, RSS_TIE_RTOL, ImagingRules
from .value_objects import CouplingObservation, GeometryFit, ObservationKind, StatePair

logger = logging.getLogger(__name__)

MapFn = Callable[[Callable, Iterable], Iterable]


class CouplingForwardModel:
    """Couplings C(r12, r23) for a fixed list of (kind, JT, state pair) entries."""

    def __init__(
        self,
        b: MagneticField,
        entries: Sequence[Tuple[ObservationKind, str, StatePair]],
        constants: Optional[PhysicalConstants] = None,
    ):
        self.calculator = CouplingCalculator(b, constants)
        self.entries = [(ObservationKind.parse(kind), jt, tuple(pair)) for kind, jt, pair in entries]

    @classmethod
    def from_observations(
        cls,
        b: MagneticField,
        observations: Sequence[CouplingObservation],
        assignment: Optional[Sequence[StatePair]] = None,
        constants: Optional[PhysicalConstants] = None,
    ) -> "CouplingForwardModel":
        assignment = assignment or [obs.candidates[0] for obs in observations]
        if len(assignment) != len(observations):
            raise ValueError("Assignment needs one state pair per observation")
        return cls(b, [(obs.kind, obs.jt, pair) for obs, pair in zip(observations, assignment)], constants)

    def value(self, kind: ObservationKind, jt: str, pair: StatePair, r12, r23) -> float:
        """
        One coupling in kHz.

        Raises:
            SpectroError: If the configuration has no labeled flip-flop pair
            SpinModelError: If the geometry cannot be evaluated
        """
        calc = self.calculator
        if kind is ObservationKind.X:
            return calc.flip_flop(r23, jt, pair[0], pair[1])
        r13 = np.asarray(r12) + np.asarray(r23)
        if kind is ObservationKind.D1:
            return calc.nv_coupling(r12, jt, pair[0], pair[1], site=0)
        if kind is ObservationKind.D2:
            return calc.nv_coupling(r13, jt, pair[0], pair[1], site=1)
        return calc.nv_coupling(r12, jt, pair[0], pair[1], site=0) - calc.nv_coupling(
            r13, jt, pair[0], pair[1], site=1
        )

    def evaluate(self, r12, r23) -> np.ndarray:
        return np.array([self.value(kind, jt, pair, r12, r23) for kind, jt, pair in self.entries])

    def evaluate_lenient(self, r12, r23) -> np.ndarray:
        """Like evaluate, reading undefined couplings as 0 kHz."""
        values = []
        for kind, jt, pair in self.entries:
            try:
                values.append(self.value(kind, jt, pair, r12, r23))
            except (SpectroError, SpinModelError) as exc:
                logger.debug(f"Model coupling {kind.value} {jt} {pair} undefined: {exc.message}")
                values.append(0.0)
        return np.array(values)


def forward_couplings(
    b: MagneticField,
    geometry: DefectGeometry,
    observations: Sequence[CouplingObservation],
    assignment: Optional[Sequence[StatePair]] = None,
    constants: Optional[PhysicalConstants] = None,
) -> np.ndarray:
    """Model coupling vector (kHz) for a geometry and one state pair per observation."""
    model = CouplingForwardModel.from_observations(b, observations, assignment, constants)
    needs_nv = any(kind.needs_nv for kind, _, _ in model.entries)
    r12 = geometry.require_r12() if needs_nv else None
    return model.evaluate(r12, geometry.require_r23())


def random_starts(rng: np.random.Generator, n_starts: int, r_min: float, r_max: float) -> np.ndarray:
    """Cartesian start vectors drawn uniformly in r, theta and phi."""
    ImagingRules.validate_radius_box(r_min, r_max)
    r = rng.uniform(r_min, r_max, n_starts)
    theta = rng.uniform(0.0, np.pi, n_starts)
    phi = rng.uniform(0.0, 2.0 * np.pi, n_starts)
    return np.column_stack([
        r * np.sin(theta) * np.cos(phi),
        r * np.sin(theta) * np.sin(phi),
        r * np.cos(theta),
    ])


def clamp_radius(x: np.ndarray) -> np.ndarray:
    r = float(np.linalg.norm(x))
    if r < MIN_RADIUS_NM:
        if r == 0.0:
            return np.array([0.0, 0.0, MIN_RADIUS_NM])
        return x * (MIN_RADIUS_NM / r)
    return x


def spherical_stderr(x: np.ndarray, covariance: np.ndarray) -> Tuple[float, float, float]:
    """Propagate a Cartesian covariance to (r, theta, phi) standard errors."""
    px, py, pz = x
    r2 = px * px + py * py + pz * pz
    r = np.sqrt(r2)
    rho2 = max(px * px + py * py, 1e-30)
    rho = np.sqrt(rho2)
    gradient = np.array([
        [px / r, py / r, pz / r],
        [px * pz / (r2 * rho), py * pz / (r2 * rho), -rho / r2],
        [-py / rho2, px / rho2, 0.0],
    ])
    variances = np.diag(gradient @ covariance @ gradient.T)
    return tuple(float(np.sqrt(max(v, 0.0))) for v in variances)


def _covariance(jacobian: np.ndarray, rss: float, n_residuals: int) -> np.ndarray:
    n_params = jacobian.shape[1]
    dof = max(n_residuals - n_params, 1)
    return np.linalg.pinv(jacobian.T @ jacobian) * rss / dof


def _multi_start(
    residuals: Callable[[np.ndarray], np.ndarray],
    starts: np.ndarray,
    solver: ILeastSquaresSolver,
    map_fn: MapFn,
):
    def run(x0):
        try:
            result = solver.solve(residuals, x0)
        except (ValueError, ArithmeticError, np.linalg.LinAlgError, DomainException) as exc:
            return None, str(exc)
        if not np.all(np.isfinite(result.x)) or not np.isfinite(result.rss):
            return None, "non-finite solution"
        return result, result.message

    outcomes = list(map_fn(run, list(starts)))
    converged = [result for result, _ in outcomes if result is not None]
    if not converged:
        raise FitFailureError(
            "All fit starts diverged",
            details={"n_starts": len(starts), "diagnostics": [message for _, message in outcomes][:20]}
        )
    unconverged = len(outcomes) - sum(1 for result, _ in outcomes if result is not None and result.success)
    if unconverged > len(outcomes) // 2:
        logger.warning(f"{unconverged} of {len(outcomes)} fit starts did not report convergence")
    best = min(converged, key=lambda result: result.rss)
    return best, len(converged)


def _observations_of(observations, assignment, kinds):
    assignment = list(assignment or [obs.candidates[0] for obs in observations])
    if len(assignment) != len(observations):
        raise ValueError("Assignment needs one state pair per observation")
    selected = [(obs, pair) for obs, pair in zip(observations, assignment) if obs.kind in kinds]
    return [obs for obs, _ in selected], [pair for _, pair in selected]


def fit_p1_pair(
    b: MagneticField,
    observations: Sequence[CouplingObservation],
    solver: ILeastSquaresSolver,
    rng: np.random.Generator,
    n_starts: int = 300,
    assignment: Optional[Sequence[StatePair]] = None,
    r_bounds: Tuple[float, float] = (1.0, 30.0),
    constants: Optional[PhysicalConstants] = None,
    map_fn: MapFn = map,
) -> GeometryFit:
    """
    Fit the P1-P1 vector r23 to the measured flip-flop couplings.

    Only X observations enter. Fewer than three couplings give an
    underdetermined fit, which is logged and flagged.

    Raises:
        FitFailureError: If no start converges
    """
    obs, pairs = _observations_of(observations, assignment, {ObservationKind.X})
    if not obs:
        raise ValueError("P1-P1 fit needs at least one X observation")
    model = CouplingForwardModel.from_observations(b, obs, pairs, constants)
    measured = np.array([o.value_khz for o in obs])
    underdetermined = ImagingRules.is_underdetermined(len(measured))
    if underdetermined:
        logger.warning(f"P1-P1 fit is underdetermined: {len(measured)} couplings for 3 parameters")

    def residuals(x):
        return np.abs(model.evaluate_lenient(None, clamp_radius(x))) - measured

    starts = random_starts(rng, n_starts, *r_bounds)
    best, n_converged = _multi_start(residuals, starts, solver, map_fn)
    x = clamp_radius(best.x)
    covariance = _covariance(best.jacobian, best.rss, len(measured))
    r_err, theta_err, phi_err = spherical_stderr(x, covariance)
    logger.info(f"P1-P1 fit: rss {best.rss:.3e} kHz^2, |r23| {np.linalg.norm(x):.3f} nm, {n_converged}/{n_starts} converged")
    return GeometryFit(
        r12=None,
        r23=SphericalVector.from_cartesian(x),
        stderr={"r23_r": r_err, "r23_theta": theta_err, "r23_phi": phi_err},
        rss=best.rss,
        n_starts=n_starts,
        n_converged=n_converged,
        assignment=tuple(pairs),
        underdetermined=underdetermined,
    )


def fit_nv_position(
    b: MagneticField,
    observations: Sequence[CouplingObservation],
    r23: SphericalVector,
    solver: ILeastSquaresSolver,
    rng: np.random.Generator,
    n_starts: int = 400,
    assignment: Optional[Sequence[StatePair]] = None,
    r_bounds: Tuple[float, float] = (1.0, 30.0),
    constants: Optional[PhysicalConstants] = None,
    map_fn: MapFn = map,
) -> GeometryFit:
    """
    Fit the NV-to-P1 vector r12 with r23 held fixed.

    Uses the Z, D1 and D2 observations. The inverted pair (-r12, -r23) fits
    equally well.

    Raises:
        FitFailureError: If no start converges
    """
    obs, pairs = _observations_of(observations, assignment, {ObservationKind.Z, ObservationKind.D1, ObservationKind.D2})
    if not obs:
        raise ValueError("NV fit needs at least one Z, D1 or D2 observation")
    model = CouplingForwardModel.from_observations(b, obs, pairs, constants)
    measured = np.array([o.value_khz for o in obs])
    r23_cart = r23.cartesian
    underdetermined = ImagingRules.is_underdetermined(len(measured))
    if underdetermined:
        logger.warning(f"NV fit is underdetermined: {len(measured)} couplings for 3 parameters")

    def residuals(x):
        return np.abs(model.evaluate_lenient(clamp_radius(x), r23_cart)) - measured

    starts = random_starts(rng, n_starts, *r_bounds)
    best, n_converged = _multi_start(residuals, starts, solver, map_fn)
    x = clamp_radius(best.x)
    covariance = _covariance(best.jacobian, best.rss, len(measured))
    r_err, theta_err, phi_err = spherical_stderr(x, covariance)
    logger.info(f"NV fit: rss {best.rss:.3e} kHz^2, |r12| {np.linalg.norm(x):.3f} nm, {n_converged}/{n_starts} converged")
    return GeometryFit(
        r12=SphericalVector.from_cartesian(x),
        r23=r23,
        stderr={"r12_r": r_err, "r12_theta": theta_err, "r12_phi": phi_err},
        rss=best.rss,
        n_starts=n_starts,
        n_converged=n_converged,
        assignment=tuple(pairs),
        underdetermined=underdetermined,
    )


def enumerate_assignments(observations: Sequence[CouplingObservation]) -> List[Tuple[int, Tuple[StatePair, ...]]]:
    """Cross product of candidate pairs, 1-based, first candidates first."""
    combos = product(*[obs.candidates for obs in observations])
    return [(index, tuple(combo)) for index, combo in enumerate(combos, start=1)]


def permutation_search(
    b: MagneticField,
    observations: Sequence[CouplingObservation],
    solver: ILeastSquaresSolver,
    rng: np.random.Generator,
    n_starts: int = 300,
    r_bounds: Tuple[float, float] = (1.0, 30.0),
    constants: Optional[PhysicalConstants] = None,
    map_fn: MapFn = map,
) -> List[PermutationResult]:
    """
    Fit every candidate assignment and rank by RSS.

    Each assignment gets its own start stream derived from rng. Results
    within a relative RSS window of the best are marked tied.
    """
    assignments = enumerate_assignments(observations)
    seeds = rng.integers(0, 2 ** 63 - 1, size=len(assignments))
    results = []
    for (index, assignment), seed in zip(assignments, seeds):
        fit = fit_p1_pair(
            b, observations, solver, np.random.default_rng(int(seed)), n_starts,
            assignment=assignment, r_bounds=r_bounds, constants=constants, map_fn=map_fn,
        )
        results.append(PermutationResult(index=index, assignment=assignment, fit=fit.with_permutation(index)))

    results.sort(key=lambda item: (item.rss, item.index))
    best = results[0].rss
    for item in results[1:]:
        item.tied = item.rss - best <= RSS_TIE_RTOL * max(best, 1e-300)
    if len(results) > 1 and results[1].tied:
        results[0].tied = True
        logger.warning(f"Permutation search has tied assignments at rss {best:.3e}")
    logger.info(f"Permutation search over {len(results)} assignments; best index {results[0].index}")
    return results


def symmetry_orbit(r12: np.ndarray, r23: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Geometries indistinguishable from (r12, r23): inversion and P1 relabeling."""
    r12 = np.asarray(r12, dtype=float)
    r23 = np.asarray(r23, dtype=float)
    return [
        (r12, r23),
        (-r12, -r23),
        (-r12 - r23, r23),
        (r12 + r23, -r23),
    ]


def p1_error(fitted_r23: np.ndarray, true_r23: np.ndarray) -> np.ndarray:
    """Cartesian deviation of r23 resolved over its inversion."""
    candidates = [fitted_r23 - true_r23, fitted_r23 + true_r23]
    return min(candidates, key=np.linalg.norm)


def nv_error(fitted_r12: np.ndarray, true_r12: np.ndarray, true_r23: np.ndarray) -> np.ndarray:
    """Cartesian deviation of r12 resolved over the symmetry orbit."""
    candidates = [fitted_r12 - member for member, _ in symmetry_orbit(true_r12, true_r23)]
    return min(candidates, key=np.linalg.norm)


def _observations_from(template, values, kind: ObservationKind) -> List[CouplingObservation]:
    return [
        CouplingObservation(tau=0.0, jt=jt, candidates=(pair,), value_khz=float(value), kind=kind)
        for (jt, pair), value in zip(template, values)
    ]


def benchmark(
    b: MagneticField,
    template: Sequence[Tuple[str, StatePair]],
    solver: ILeastSquaresSolver,
    rng: np.random.Generator,
    n_positions: int = 10,
    n_noisy_sets: int = 200,
    noise_std: float = 0.002,
    n_starts_p1: int = 300,
    n_starts_nv: int = 400,
    r_bounds: Tuple[float, float] = (1.0, 30.0),
    position_bounds: Tuple[float, float] = (2.0, 15.0),
    constants: Optional[PhysicalConstants] = None,
    map_fn: MapFn = map,
) -> List[BenchmarkRow]:
    """
    Synthetic reconstruction benchmark.

    For each random geometry the exact X and Z couplings of every template
    configuration are perturbed by relative Gaussian noise and refitted.
    Errors are Cartesian distances to the truth, resolved over the
    symmetry orbit.
    """
    rows = []
    x_model = CouplingForwardModel(b, [(ObservationKind.X, jt, pair) for jt, pair in template], constants)
    z_model = CouplingForwardModel(b, [(ObservationKind.Z, jt, pair) for jt, pair in template], constants)
    pairs = [pair for _, pair in template]

    for position in range(1, n_positions + 1):
        r12_true, r23_true = random_starts(rng, 2, *position_bounds)
        exact_x = np.abs(x_model.evaluate_lenient(None, r23_true))
        exact_z = np.abs(z_model.evaluate_lenient(r12_true, r23_true))

        p1_errors, nv_errors = [], []
        for _ in range(n_noisy_sets):
            noisy_x = exact_x * (1.0 + noise_std * rng.standard_normal(exact_x.shape))
            noisy_z = exact_z * (1.0 + noise_std * rng.standard_normal(exact_z.shape))
            p1_fit = fit_p1_pair(
                b, _observations_from(template, noisy_x, ObservationKind.X), solver, rng, n_starts_p1,
                assignment=pairs, r_bounds=r_bounds, constants=constants, map_fn=map_fn,
            )
            nv_fit = fit_nv_position(
                b, _observations_from(template, noisy_z, ObservationKind.Z), p1_fit.r23, solver, rng, n_starts_nv,
                assignment=pairs, r_bounds=r_bounds, constants=constants, map_fn=map_fn,
            )
            p1_errors.append(p1_error(p1_fit.r23.cartesian, r23_true))
            nv_errors.append(nv_error(nv_fit.r12.cartesian, r12_true, r23_true))

        p1_errors = np.array(p1_errors)
        nv_errors = np.array(nv_errors)
        p1_norms = np.linalg.norm(p1_errors, axis=1)
        nv_norms = np.linalg.norm(nv_errors, axis=1)
        rows.append(BenchmarkRow(
            position_index=position,
            r12_true=[float(v) for v in r12_true],
            r23_true=[float(v) for v in r23_true],
            p1_error_mean=float(p1_norms.mean()),
            p1_error_median=float(np.median(p1_norms)),
            nv_error_mean=float(nv_norms.mean()),
            nv_error_median=float(np.median(nv_norms)),
            nv_error_max=float(nv_norms.max()),
            p1_axis_errors=[float(v) for v in np.abs(p1_errors).mean(axis=0)],
            nv_axis_errors=[float(v) for v in np.abs(nv_errors).mean(axis=0)],
            n_noisy_sets=n_noisy_sets,
        ))
        logger.info(
            f"Benchmark position {position}: P1 median {rows[-1].p1_error_median:.4f} nm, "
            f"NV median {rows[-1].nv_error_median:.4f} nm"
        )
    return rows
