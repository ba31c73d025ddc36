import numpy as np
import pytest

from app.application.common.context import RunContext
from app.application.imaging.service import ImagingService, reference_observations
from app.config.settings import Settings
from app.domain.imaging.exceptions import FitFailureError
from app.domain.imaging.fitting import (
    CouplingForwardModel,
    benchmark,
    clamp_radius,
    enumerate_assignments,
    fit_nv_position,
    fit_p1_pair,
    forward_couplings,
    nv_error,
    p1_error,
    permutation_search,
    random_starts,
    spherical_stderr,
    symmetry_orbit,
)
from app.domain.imaging.interfaces import ILeastSquaresSolver
from app.domain.imaging.rules import ImagingRules
from app.domain.imaging.value_objects import CouplingObservation, ObservationKind, LeastSquaresResult
from app.domain.spectro.exceptions import NoFlipFlopError
from app.domain.spins.exceptions import MissingGeometryError
from app.domain.spins.value_objects import DefectGeometry, MagneticField, SphericalVector
from app.infrastructure.optimization.scipy_solver import ScipyLeastSquaresSolver

WORKING_FIELD = MagneticField(2.43, 1.42, 45.552)
TRUE_R23 = SphericalVector(7.4, 1.9, 0.8).cartesian
TRUE_R12 = SphericalVector(11.2, 1.1, 2.3).cartesian

TEMPLATE = [
    ("B", (("+u", "+d"), ("+d", "0u"))),
    ("A", (("-u", "-d"), ("0d", "-u"))),
    ("A", (("0u", "0d"),)),
    ("D", (("+u", "+d"), ("0u", "+d"))),
]


class _DummySolver(ILeastSquaresSolver):
    """Returns a fixed point, evaluating the residuals there."""

    def __init__(self, x):
        self.x = np.asarray(x, dtype=float)
        self.calls = 0

    def solve(self, residuals, x0):
        self.calls += 1
        r = np.asarray(residuals(self.x))
        return LeastSquaresResult(x=self.x, residuals=r, jacobian=np.eye(r.size, 3), success=True)


class _FailingSolver(ILeastSquaresSolver):
    def solve(self, residuals, x0):
        raise ValueError("diverged")


def _x_observations():
    model = CouplingForwardModel(
        WORKING_FIELD, [(ObservationKind.X, jt, pairs[0]) for jt, pairs in TEMPLATE]
    )
    values = np.abs(model.evaluate(None, TRUE_R23))
    return [
        CouplingObservation(tau=float(i), jt=jt, candidates=pairs, value_khz=float(v))
        for i, ((jt, pairs), v) in enumerate(zip(TEMPLATE, values))
    ]


def test_observation_kind_parses_aliases():
    assert ObservationKind.parse("p1-p1") is ObservationKind.X
    assert ObservationKind.parse(" detuning ") is ObservationKind.Z
    assert ObservationKind.parse("NV-P1") is ObservationKind.D1
    assert not ObservationKind.X.needs_nv
    assert ObservationKind.D2.needs_nv

    with pytest.raises(ValueError):
        ObservationKind.parse("Y")


def test_coupling_observation_validates_value_and_candidates():
    obs = CouplingObservation(14.0, "a", [["-u", "-d"]], 18.114, "Z")

    assert obs.jt == "A"
    assert obs.kind is ObservationKind.Z
    assert obs.candidates == (("-u", "-d"),)

    with pytest.raises(ValueError):
        CouplingObservation(14.0, "A", (("-u", "-d"),), float("nan"))
    with pytest.raises(ValueError):
        CouplingObservation(14.0, "A", (), 18.114)


def test_imaging_rules_flag_fewer_residuals_than_parameters():
    assert ImagingRules.is_underdetermined(2)
    assert not ImagingRules.is_underdetermined(3)

    with pytest.raises(ValueError):
        ImagingRules.validate_radius_box(5.0, 1.0)


def test_clamp_radius_enforces_floor():
    assert np.allclose(clamp_radius(np.zeros(3)), [0.0, 0.0, 0.1])
    assert np.linalg.norm(clamp_radius(np.array([0.01, 0.0, 0.0]))) == pytest.approx(0.1)
    assert np.allclose(clamp_radius(np.array([3.0, 4.0, 0.0])), [3.0, 4.0, 0.0])


def test_random_starts_stay_inside_radius_box():
    starts = random_starts(np.random.default_rng(0), 500, 2.0, 15.0)
    norms = np.linalg.norm(starts, axis=1)

    assert starts.shape == (500, 3)
    assert norms.min() >= 2.0 and norms.max() <= 15.0


def test_spherical_stderr_on_x_axis():
    errors = spherical_stderr(np.array([2.0, 0.0, 0.0]), np.eye(3) * 0.01)

    assert errors == pytest.approx((0.1, 0.05, 0.05))


def test_symmetry_orbit_contains_inversion_and_relabeling():
    orbit = symmetry_orbit(TRUE_R12, TRUE_R23)

    assert len(orbit) == 4
    assert np.allclose(orbit[1][0], -TRUE_R12) and np.allclose(orbit[1][1], -TRUE_R23)
    assert np.allclose(orbit[2][0] + orbit[2][1], -TRUE_R12)


def test_errors_are_resolved_over_symmetry():
    assert np.linalg.norm(p1_error(-TRUE_R23, TRUE_R23)) == pytest.approx(0.0)
    assert np.linalg.norm(nv_error(-TRUE_R12 - TRUE_R23, TRUE_R12, TRUE_R23)) == pytest.approx(0.0)
    assert np.linalg.norm(nv_error(TRUE_R12 + [0.1, 0.0, 0.0], TRUE_R12, TRUE_R23)) == pytest.approx(0.1)


def test_enumerate_assignments_is_one_based_cross_product():
    observations = _x_observations()

    assignments = enumerate_assignments(observations)

    assert len(assignments) == 2 * 2 * 1 * 2
    assert assignments[0] == (1, tuple(pairs[0] for _, pairs in TEMPLATE))
    assert assignments[-1][0] == 8


def test_fit_p1_pair_reports_solver_point_and_flags_small_sets():
    solver = _DummySolver(TRUE_R23)

    fit = fit_p1_pair(WORKING_FIELD, _x_observations()[:2], solver, np.random.default_rng(1), n_starts=3)

    assert solver.calls == 3
    assert fit.underdetermined
    assert fit.rss == pytest.approx(0.0, abs=1e-18)
    assert np.allclose(fit.r23.cartesian, TRUE_R23)
    assert fit.n_converged == 3


def test_fit_p1_pair_raises_when_every_start_fails():
    with pytest.raises(FitFailureError) as exc:
        fit_p1_pair(WORKING_FIELD, _x_observations(), _FailingSolver(), np.random.default_rng(1), n_starts=4)

    assert exc.value.details["n_starts"] == 4
    assert exc.value.details["diagnostics"][0] == "diverged"


def test_fit_p1_pair_needs_an_x_observation():
    detuning = [CouplingObservation(14.0, "A", (("-u", "-d"),), 3.0, ObservationKind.Z)]

    with pytest.raises(ValueError):
        fit_p1_pair(WORKING_FIELD, detuning, _DummySolver(TRUE_R23), np.random.default_rng(1), n_starts=1)


def test_permutation_search_ranks_generating_assignment_first():
    results = permutation_search(
        WORKING_FIELD, _x_observations(), _DummySolver(TRUE_R23), np.random.default_rng(2), n_starts=1
    )

    assert len(results) == 8
    assert results[0].index == 1
    assert results[0].rss == pytest.approx(0.0, abs=1e-18)
    assert results[0].fit.permutation_index == 1
    assert [r.rss for r in results] == sorted(r.rss for r in results)


def test_forward_couplings_only_need_r23_for_flip_flops():
    observations = _x_observations()
    geometry = DefectGeometry(r23=SphericalVector(7.4, 1.9, 0.8))

    couplings = forward_couplings(WORKING_FIELD, geometry, observations)

    assert np.allclose(np.abs(couplings), [o.value_khz for o in observations])

    detuning = [CouplingObservation(14.0, "A", (("-u", "-d"),), 3.0, ObservationKind.Z)]
    with pytest.raises(MissingGeometryError):
        forward_couplings(WORKING_FIELD, geometry, detuning)


def test_forward_couplings_propagate_undefined_flip_flops():
    geometry = DefectGeometry(r23=SphericalVector(7.4, 1.9, 0.8))
    same_state = [CouplingObservation(14.0, "A", (("0u", "0u"),), 3.0)]

    with pytest.raises(NoFlipFlopError):
        forward_couplings(WORKING_FIELD, geometry, same_state)

    model = CouplingForwardModel.from_observations(WORKING_FIELD, same_state)
    assert model.evaluate_lenient(None, TRUE_R23).tolist() == [0.0]


def test_real_solver_ranks_fixed_nitrogen_assignment_first():
    rng = np.random.default_rng(21)
    template = TEMPLATE + [("B", (("0u", "0d"),))]
    model = CouplingForwardModel(WORKING_FIELD, [(ObservationKind.X, jt, pairs[0]) for jt, pairs in template])
    values = np.abs(model.evaluate(None, TRUE_R23)) * (1.0 + 0.002 * rng.standard_normal(len(template)))
    # Only the first resonance keeps its second candidate: two assignments
    observations = [
        CouplingObservation(float(i), jt, pairs if i == 0 else pairs[:1], float(v))
        for i, ((jt, pairs), v) in enumerate(zip(template, values))
    ]

    results = permutation_search(
        WORKING_FIELD, observations, ScipyLeastSquaresSolver(), np.random.default_rng(5),
        n_starts=24, r_bounds=(5.0, 10.0),
    )

    assert len(results) == 2
    assert results[0].index == 1
    assert results[1].rss > 10.0 * results[0].rss
    assert np.linalg.norm(p1_error(results[0].fit.r23.cartesian, TRUE_R23)) < 0.1


def test_fit_nv_position_keeps_r23_fixed():
    r23 = SphericalVector(7.4, 1.9, 0.8)
    entries = [(ObservationKind.Z, jt, pairs[0]) for jt, pairs in TEMPLATE]
    values = np.abs(CouplingForwardModel(WORKING_FIELD, entries).evaluate(TRUE_R12, TRUE_R23))
    observations = [
        CouplingObservation(float(i), jt, pairs, float(v), ObservationKind.Z)
        for i, ((jt, pairs), v) in enumerate(zip(TEMPLATE, values))
    ]

    fit = fit_nv_position(WORKING_FIELD, observations, r23, _DummySolver(TRUE_R12), np.random.default_rng(3), n_starts=2)

    assert fit.r23 is r23
    assert np.allclose(fit.r12.cartesian, TRUE_R12)
    assert fit.rss == pytest.approx(0.0, abs=1e-18)
    assert set(fit.stderr) == {"r12_r", "r12_theta", "r12_phi"}
    assert not fit.underdetermined


def test_fit_nv_position_needs_nv_observations():
    with pytest.raises(ValueError):
        fit_nv_position(
            WORKING_FIELD, _x_observations(), SphericalVector(7.4, 1.9, 0.8),
            _DummySolver(TRUE_R12), np.random.default_rng(3), n_starts=1,
        )


def test_benchmark_rows_summarize_each_position():
    template = [(jt, pairs[0]) for jt, pairs in TEMPLATE]

    rows = benchmark(
        WORKING_FIELD, template, _DummySolver(TRUE_R23), np.random.default_rng(9),
        n_positions=2, n_noisy_sets=3, n_starts_p1=1, n_starts_nv=1,
    )

    assert [row.position_index for row in rows] == [1, 2]
    # A fixed solver point gives the same error for every noisy replica
    for row in rows:
        assert row.n_noisy_sets == 3
        assert row.p1_error_mean == pytest.approx(row.p1_error_median)
        assert row.nv_error_max == pytest.approx(row.nv_error_mean)
        assert len(row.p1_axis_errors) == 3
        assert 2.0 <= np.linalg.norm(row.r23_true) <= 15.0


def test_scipy_solver_finds_minimum_of_linear_residuals():
    target = np.array([1.0, -2.0, 3.0])

    result = ScipyLeastSquaresSolver().solve(lambda x: np.concatenate([x - target, [0.5 * (x[0] - 1.0)]]), np.zeros(3))

    assert result.success
    assert np.allclose(result.x, target, atol=1e-8)
    assert result.rss == pytest.approx(0.0, abs=1e-12)


def test_scipy_solver_accepts_fewer_residuals_than_parameters():
    result = ScipyLeastSquaresSolver().solve(lambda x: np.array([x[0] + x[1] + x[2] - 3.0]), np.zeros(3))

    assert result.rss == pytest.approx(0.0, abs=1e-12)


def test_reference_observations_pair_x_with_implied_detuning():
    observations = reference_observations()

    x_obs = [o for o in observations if o.kind is ObservationKind.X]
    z_obs = [o for o in observations if o.kind is ObservationKind.Z]
    assert [o.value_khz for o in x_obs] == [22.106, 18.114, 14.837, 13.414, 8.591]
    assert len(z_obs) == 5
    assert len(reference_observations(include_detuning=False)) == 5


def test_imaging_service_fit_reports_permutations_and_equivalent_geometries():
    service = ImagingService(RunContext.resolve(Settings(), seed=5), _DummySolver(TRUE_R23))
    observations = _x_observations() + [
        CouplingObservation(0.0, "B", (("+u", "+d"),), 2.0, ObservationKind.Z),
        CouplingObservation(2.0, "A", (("0u", "0d"),), 1.5, ObservationKind.Z),
    ]

    report = service.fit(observations, n_starts_p1=1, n_starts_nv=1)

    assert len(report.permutations) == 8
    assert report.permutations[0].index == 1
    assert report.nv_fit is not None
    assert len(report.equivalent_geometries) == 4
    assert set(ImagingService.report_dict(report)) == {"permutations", "p1_fit", "nv_fit", "equivalent_geometries"}


def test_imaging_service_fit_requires_x_observation():
    service = ImagingService(RunContext.resolve(Settings()), _DummySolver(TRUE_R23))

    with pytest.raises(ValueError):
        service.fit([CouplingObservation(0.0, "A", (("0u", "0d"),), 1.5, ObservationKind.Z)])
