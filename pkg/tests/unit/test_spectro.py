import math

import numpy as np
import pytest

from app.application.common.context import RunContext
from app.application.spectro.service import SpectroService
from app.config.settings import Settings
from app.domain.spectro.couplings import (
    CouplingCalculator,
    JT_AXES,
    NITROGEN_PROJECTIONS,
    equivalent_axes,
    fixed_nitrogen_states,
    implied_detuning,
    pair_subspace_splitting,
    pseudo_spin_frequency,
    ramsey_table,
    resonant_configuration_fraction,
    resonant_tau,
)
from app.domain.spectro.eigensystems import labeled_eigensystem, p1_dressed_basis, transition_gaps
from app.domain.spectro.exceptions import (
    DegenerateLabelingError,
    NoFlipFlopError,
    NoResonanceError,
    SpectroError,
)
from app.domain.spectro.value_objects import EffectiveCouplings
from app.domain.spins.value_objects import (
    JahnTellerAxis,
    MagneticField,
    PhysicalConstants,
    SphericalVector,
)

HIGH_FIELD = MagneticField(100.0, 100.0, 10000.0)
WORKING_FIELD = MagneticField(2.43, 1.42, 45.552)


def test_fixed_nitrogen_states_use_projection_prefix():
    assert fixed_nitrogen_states(1) == ("+u", "+d")
    assert fixed_nitrogen_states(-1) == ("-u", "-d")

    with pytest.raises(ValueError):
        fixed_nitrogen_states(2)


def test_labeled_eigensystem_labels_diagonal_matrix_by_position():
    system = labeled_eigensystem(np.diag([3.0, 1.0, 2.0]), ("a", "b", "c"))

    assert system.labels == ("b", "c", "a")
    assert system.energy("a") == pytest.approx(3.0)
    assert system.min_overlap == pytest.approx(1.0)
    assert not system.is_ambiguous


def test_labeled_eigensystem_flags_equal_superpositions():
    h = np.array([[0.0, 1.0], [1.0, 0.0]])

    system = labeled_eigensystem(h, ("a", "b"))

    assert system.is_ambiguous
    with pytest.raises(DegenerateLabelingError):
        system.index_of("a")
    with pytest.raises(DegenerateLabelingError):
        labeled_eigensystem(h, ("a", "b"), strict=True)


def test_labeled_eigensystem_rejects_label_count_mismatch():
    with pytest.raises(ValueError):
        labeled_eigensystem(np.eye(2), ("a", "b", "c"))


def test_p1_dressed_basis_has_six_labeled_states_at_working_field():
    basis = p1_dressed_basis(WORKING_FIELD, JahnTellerAxis("A"), PhysicalConstants())

    assert basis.labels == ("+u", "+d", "0u", "0d", "-u", "-d")
    assert basis.operators.shape == (3, 6, 6)
    assert len(transition_gaps(basis)) == 15


def test_pair_subspace_splitting_of_two_level_block():
    h = np.array([[1.0, 0.002, 0.0], [0.002, 1.0, 0.0], [0.0, 0.0, 50.0]])

    assert pair_subspace_splitting(h, 0, 1) == pytest.approx(4.0)


def test_pair_subspace_splitting_rejects_mixed_subspace():
    h = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])

    with pytest.raises(NoFlipFlopError):
        pair_subspace_splitting(h, 0, 1, min_overlap=0.9)


def test_flip_flop_rejects_identical_states():
    calculator = CouplingCalculator(WORKING_FIELD)

    with pytest.raises(NoFlipFlopError):
        calculator.flip_flop([0.0, 0.0, 10.0], "A", "0u", "0u")


def test_flip_flop_at_high_field_matches_secular_dipolar_formula():
    # Electrons quantized along z: |X| = prefactor |3 cos^2 - 1| / (2 r^3)
    constants = PhysicalConstants()
    calculator = CouplingCalculator(HIGH_FIELD, constants)

    x = calculator.flip_flop([0.0, 0.0, 10.0], "D", "0u", "0d")

    assert abs(x) == pytest.approx(constants.dipolar_prefactor * 2.0 / (2.0 * 1000.0) * 1000.0, rel=0.02)


def test_flip_flop_at_high_field_is_the_same_for_all_configurations():
    calculator = CouplingCalculator(HIGH_FIELD)
    r23 = SphericalVector(7.4, 1.9, 0.8).cartesian

    values = [
        abs(calculator.flip_flop(r23, axis, *fixed_nitrogen_states(m_i)))
        for axis in JT_AXES
        for m_i in NITROGEN_PROJECTIONS
    ]

    mean = np.mean(values)
    assert len(values) == 12
    assert max(abs(v - mean) for v in values) <= 0.01 * mean


def test_flip_flop_is_invariant_under_orientation_variant():
    calculator = CouplingCalculator(WORKING_FIELD)
    r23 = SphericalVector(7.4, 1.9, 0.8).cartesian

    primary = calculator.flip_flop(r23, JahnTellerAxis("B"), "0u", "0d")
    mirrored = calculator.flip_flop(r23, JahnTellerAxis("B", "mirror"), "0u", "0d")

    assert abs(mirrored) == pytest.approx(abs(primary), rel=1e-6)


def test_nv_coupling_falls_off_with_inverse_cube():
    calculator = CouplingCalculator(WORKING_FIELD)

    near = calculator.nv_coupling([0.0, 0.0, 10.0], "A", "0u", "0d")
    far = calculator.nv_coupling([0.0, 0.0, 20.0], "A", "0u", "0d")

    assert near / far == pytest.approx(8.0, rel=0.02)


def test_couplings_keep_detuning_equal_to_nv_difference():
    calculator = CouplingCalculator(WORKING_FIELD)
    r12 = SphericalVector(11.2, 1.1, 2.3).cartesian
    r23 = SphericalVector(7.4, 1.9, 0.8).cartesian

    row = calculator.couplings(r12, r23, "A", "0u", "0d", m_I=0)

    assert row.Z == pytest.approx(row.D1 - row.D2)
    assert row.is_fixed_nitrogen


def test_effective_couplings_reject_inconsistent_detuning():
    with pytest.raises(ValueError):
        EffectiveCouplings(JahnTellerAxis("A"), 0, ("0u", "0d"), X=10.0, Z=5.0, D1=3.0, D2=1.0)


def test_pseudo_spin_frequency_combines_coupling_and_detuning():
    assert pseudo_spin_frequency(3.0, 4.0, -1) == pytest.approx(5.0)
    assert pseudo_spin_frequency(3.0, 4.0, 0) == pytest.approx(3.0)

    with pytest.raises(ValueError):
        pseudo_spin_frequency(3.0, 4.0, 2)


def test_resonant_tau_is_quarter_period_of_resonance_frequency():
    assert resonant_tau(18.114, 0.0) == pytest.approx(1000.0 / (4.0 * 18.114))
    assert resonant_tau(3.0, 8.0) == pytest.approx(1000.0 / 20.0)


def test_resonant_tau_requires_nonzero_coupling():
    with pytest.raises(NoResonanceError):
        resonant_tau(0.0, 2.0)


def test_implied_detuning_from_measured_frequencies():
    assert implied_detuning(18.114, 18.323) == pytest.approx(math.sqrt(18.323 ** 2 - 18.114 ** 2))

    with pytest.raises(SpectroError):
        implied_detuning(18.323, 18.114)


def test_ramsey_table_marks_zero_coupling_with_infinite_tau():
    row = EffectiveCouplings(JahnTellerAxis("C"), -1, ("-u", "-d"), X=0.0, Z=2.0, D1=3.0, D2=1.0)

    table = ramsey_table([row])

    assert table[0]["tau_us"] == float("inf")
    assert table[0]["f_ms1_kHz"] == pytest.approx(2.0)
    assert table[0]["jt"] == "C"


def test_equivalent_axes_follow_angle_to_field():
    aligned = MagneticField(0.0, 0.0, 10000.0)

    assert equivalent_axes(aligned, "A", "B")
    assert equivalent_axes(aligned, "B", JahnTellerAxis("C", "mirror"))
    assert not equivalent_axes(aligned, "A", "D")
    assert not equivalent_axes(HIGH_FIELD, "A", "B")
    assert equivalent_axes(HIGH_FIELD, "C", "C")
    assert not equivalent_axes(MagneticField(0.0, 0.0, 0.0), "A", "B")


def test_resonant_fraction_at_working_field_counts_only_the_target_pair():
    result = resonant_configuration_fraction(WORKING_FIELD, SphericalVector(7.4, 1.9, 0.8))

    assert result["resonant"] == 2
    assert result["fraction"] == pytest.approx(1.0 / 288.0)


def test_p1_up_down_transitions_at_working_field():
    constants = PhysicalConstants()
    for axis, expected in (("A", 238.079), ("D", 257.994)):
        basis = p1_dressed_basis(WORKING_FIELD, JahnTellerAxis(axis), constants)

        gap = abs(basis.energies[basis.index("+d")] - basis.energies[basis.index("+u")])

        assert gap == pytest.approx(expected, abs=0.1)


def test_resonant_fraction_at_misaligned_high_field_is_one_in_twenty_four():
    result = resonant_configuration_fraction(HIGH_FIELD, SphericalVector(7.4, 1.9, 0.8))

    assert result["total"] == 576
    assert result["fraction"] == pytest.approx(1.0 / 24.0)


def test_resonant_fraction_at_aligned_high_field_is_five_in_forty_eight():
    result = resonant_configuration_fraction(MagneticField(0.0, 0.0, 10000.0), SphericalVector(7.4, 1.9, 0.8))

    assert result["fraction"] == pytest.approx(5.0 / 48.0)


def test_spectro_service_reference_resonances_agree_within_five_percent():
    service = SpectroService(RunContext.resolve(Settings()))

    rows = service.reference_resonance_check()

    assert [row["tau_observed_us"] for row in rows] == [11.2, 14.0, 16.4, 18.6, 29.0]
    assert all(row["relative_error"] < 0.05 for row in rows)


def test_spectro_service_constants_report_includes_working_point():
    service = SpectroService(RunContext.resolve(Settings(), field=[0.0, 0.0, 50.0]))

    report = service.constants_report()

    assert report["field_G"] == [0.0, 0.0, 50.0]
    assert report["zfs_delta_MHz"] == pytest.approx(2870.0)


def _flip_flop_or_zero(calculator, r23, jt, state_a, state_b):
    try:
        return abs(calculator.flip_flop(r23, jt, state_a, state_b))
    except NoFlipFlopError:
        return 0.0


def test_flip_flop_at_100_gauss_is_carried_by_fixed_nitrogen_pairs():
    calculator = CouplingCalculator(MagneticField(1.0, 1.0, 100.0))
    r23 = SphericalVector(7.4, 1.9, 0.8).cartesian

    fixed = abs(calculator.flip_flop(r23, "D", "0u", "0d"))
    mixed = [_flip_flop_or_zero(calculator, r23, "D", a, b) for a, b in (("+d", "0u"), ("0d", "-u"))]

    assert fixed > 1.0
    assert max(mixed) < 0.3 * fixed
