import math

import numpy as np
import pytest

from app.application.common.context import RunContext
from app.application.noise.service import NoiseService
from app.config.settings import NoiseCorrelation, Settings
from app.domain.noise.analysis import (
    carbon_bath_sample,
    clock_sensitivity,
    coupling_distribution,
    dephasing_curve,
    field_to_detuning_khz,
    noise_budget,
    quadrature_decompose,
    sigma_from_t2,
    t2_from_sigma,
)
from app.domain.noise.exceptions import InvalidNoiseInputError
from app.domain.noise.value_objects import DephasingCurve, FieldNoiseSpec
from app.domain.spins.value_objects import MagneticField, SphericalVector

WORKING_FIELD = MagneticField(2.43, 1.42, 45.552)
R23 = SphericalVector(7.4, 1.9, 0.8).cartesian


def test_sigma_from_measured_electron_t2star():
    assert sigma_from_t2(94e-6) == pytest.approx(2394.0, rel=1e-3)
    assert t2_from_sigma(sigma_from_t2(0.03)) == pytest.approx(0.03)


def test_sigma_from_t2_rejects_non_positive_time():
    with pytest.raises(InvalidNoiseInputError) as exc:
        sigma_from_t2(0.0)

    assert exc.value.details == {"t2star": 0.0}


def test_quadrature_decompose_removes_known_component():
    assert quadrature_decompose(2.39, 0.89) == pytest.approx(2.218, abs=1e-3)
    assert quadrature_decompose(1.0, 1.0) == pytest.approx(0.0)

    with pytest.raises(InvalidNoiseInputError):
        quadrature_decompose(0.5, 1.0)


def test_field_to_detuning_uses_electron_gyromagnetic_ratio():
    assert field_to_detuning_khz(0.3e-3) == pytest.approx(0.8407, rel=1e-3)


def test_field_noise_spec_validates_amplitudes_and_axes():
    spec = FieldNoiseSpec.from_sequence([0.0, 0.0, 0.0], "uncorrelated", [0, 2])

    assert spec.is_silent
    assert spec.correlation is NoiseCorrelation.UNCORRELATED
    assert spec.local_axes == (0, 2)

    with pytest.raises(ValueError):
        FieldNoiseSpec(-1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        FieldNoiseSpec(0.0, 0.0, 1.0, local_axes=(3,))


def test_dephasing_curve_rejects_lengths_outside_unit_interval():
    with pytest.raises(ValueError):
        DephasingCurve(times=np.array([0.0, 1.0]), bloch_length=np.array([1.0, 1.5]), t2star=None)


def test_silent_field_noise_returns_nominal_couplings():
    noise = FieldNoiseSpec(0.0, 0.0, 0.0)

    distribution = coupling_distribution(WORKING_FIELD, R23, "A", ("0u", "0d"), noise, np.random.default_rng(0), 5)

    assert distribution.x_std == 0.0
    assert np.all(distribution.x_samples == distribution.nominal_x)
    assert distribution.summary()["n_samples"] == 5


def test_correlated_field_noise_spreads_the_pair_splitting():
    noise = FieldNoiseSpec(0.0, 0.0, 0.01)

    distribution = coupling_distribution(WORKING_FIELD, R23, "A", ("0u", "0d"), noise, np.random.default_rng(1), 20)

    summary = distribution.summary()
    assert summary["correlation"] == "correlated"
    assert distribution.frequency_samples.shape == (20,)
    assert summary["std_frequency_kHz"] > 0.0


def test_clock_sensitivity_is_quadratic_for_small_detuning():
    rows = clock_sensitivity(18.114, [1.8114])

    assert rows[0]["ratio"] == pytest.approx(0.9975, abs=1e-4)
    assert rows[0]["quadratic_kHz"] == pytest.approx(1.8114 ** 2 / (2 * 18.114))


def test_clock_sensitivity_needs_nonzero_coupling():
    with pytest.raises(InvalidNoiseInputError):
        clock_sensitivity(0.0, [0.1])


def test_dephasing_without_coupling_is_gaussian_in_detuning():
    times = np.linspace(0.0, 1.0, 201)

    curve = dephasing_curve(0.0, 1.0, times, np.random.default_rng(3), n_samples=20000)

    assert curve.t2star == pytest.approx(1.0 / (math.sqrt(2.0) * math.pi), rel=0.05)
    assert curve.gaussian_t2star == pytest.approx(curve.t2star, rel=0.1)
    assert curve.bloch_length[0] == pytest.approx(1.0)


def test_dephasing_with_strong_coupling_is_protected_to_tens_of_ms():
    times = np.linspace(0.0, 100.0, 201)
    sigma = field_to_detuning_khz(0.3e-3)

    curve = dephasing_curve(18.114, sigma, times, np.random.default_rng(4), n_samples=4000)

    assert curve.t2star == pytest.approx(30.0, rel=0.15)


def test_dephasing_without_noise_never_crosses():
    curve = dephasing_curve(18.114, 0.0, np.linspace(0.0, 10.0, 11), np.random.default_rng(5), n_samples=10)

    assert curve.t2star is None
    assert np.allclose(curve.bloch_length, 1.0)


def test_dephasing_rejects_invalid_projection():
    with pytest.raises(ValueError):
        dephasing_curve(18.114, 1.0, [0.0, 1.0], np.random.default_rng(0), m_s=2)


def test_carbon_bath_spread_is_around_a_kilohertz_with_heavy_tail():
    b = carbon_bath_sample(np.random.default_rng(6), n_configs=2000)

    assert b.mean() == pytest.approx(1.2, rel=0.3)
    assert b.mean() > np.median(b)
    assert np.all(b >= 0.0)


def test_carbon_bath_rejects_invalid_concentration():
    with pytest.raises(InvalidNoiseInputError):
        carbon_bath_sample(np.random.default_rng(0), concentration=0.0, n_configs=1)


def test_noise_budget_splits_electron_dephasing():
    rows = {row["source"]: row for row in noise_budget(field_noise_hz={"typical": 10.0})}

    assert rows["electron (measured)"]["sigma_Hz"] == pytest.approx(2394.0, rel=1e-3)
    assert rows["P1 bath (quadrature remainder)"]["sigma_Hz"] == pytest.approx(2222.0, rel=0.01)
    assert rows["electron (measured)"]["t2star_ms"] == pytest.approx(0.094)
    assert rows["field noise (typical)"]["t2star_ms"] == pytest.approx(1e3 / (math.sqrt(2.0) * math.pi * 10.0))


def test_noise_service_dephasing_reports_summary_and_rows():
    service = NoiseService(RunContext.resolve(Settings(), seed=8))

    summary, rows = service.dephasing(x_khz=18.114, field_sigma_gauss=0.3e-3, max_time_ms=100.0, n_times=101, n_samples=2000)

    assert len(rows) == 101
    assert summary["delta_Z_sigma_kHz"] == pytest.approx(0.8407, rel=1e-3)
    assert summary["t2star_ms"] == pytest.approx(30.0, rel=0.2)


def test_noise_service_clock_sensitivity_skips_zero_detuning():
    rows = NoiseService(RunContext.resolve(Settings())).clock_sensitivity(18.114, n_points=11)

    assert len(rows) == 10
    assert rows[-1]["delta_Z_kHz"] == pytest.approx(1.8114)


def test_noise_service_budget_without_field_noise_has_five_rows():
    rows = NoiseService(RunContext.resolve(Settings())).budget(include_field_noise=False)

    assert len(rows) == 5
