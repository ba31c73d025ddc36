import numpy as np
import pytest

from app.application.common.context import RunContext
from app.application.rf.service import RFService
from app.config.settings import Settings
from app.domain.rf.assignment import assign_configuration, expected_response
from app.domain.rf.exceptions import InconsistentObservationError, IntegrationAccuracyError
from app.domain.rf.rules import RFRules
from app.domain.rf.simulation import (
    anchored_energies,
    listed_frequency_check,
    nearest_gap,
    period_propagator,
    rabi_trace,
    snapped_frequency,
    truth_table,
)
from app.domain.rf.value_objects import RFPulse, TruthTable, TruthTableRow
from app.domain.spectro.eigensystems import p1_dressed_basis
from app.domain.spins.value_objects import JahnTellerAxis, MagneticField, PhysicalConstants

FIELD = MagneticField(2.43, 1.42, 45.552)


def _reference_tables():
    return {axis: TruthTable.reference(axis) for axis in ("A", "B", "C", "D")}


def test_rf_pulse_defaults_to_two_over_rabi_amplitude():
    pulse = RFPulse(frequency=28.441, rabi_khz=250.0)

    assert pulse.length == pytest.approx(8.0)
    assert pulse.n_periods == 228


def test_rf_pulse_rejects_non_positive_frequency():
    with pytest.raises(ValueError):
        RFPulse(frequency=0.0)


def test_truth_table_row_parses_bit_string_in_column_order():
    row = TruthTableRow(listed_mhz=28.441, bits="110000")

    assert row.bits == (1, 1, 0, 0, 0, 0)
    assert row.responds("+d") and row.responds("0d")
    assert not row.responds("+u")
    assert row.drive_mhz == 28.441


def test_truth_table_row_rejects_malformed_bits():
    with pytest.raises(ValueError):
        TruthTableRow(listed_mhz=1.0, bits="1102")


def test_reference_table_splits_paired_listings_into_rows():
    table = TruthTable.reference("a")

    assert len(table.rows) == 8
    assert table.as_dict()[27.645] == table.as_dict()[27.715] == "110110"
    assert table.row_for(27.7, 0.02).listed_mhz == 27.715
    assert table.row_for(50.0, 0.5) is None


def test_expected_response_is_false_for_unlisted_frequency():
    table = TruthTable.reference("B")

    assert expected_response(table, 28.441, ("+u", "+d"), 5e-4)
    assert not expected_response(table, 29.281, ("+u", "+d"), 5e-4)


def test_assign_configuration_drops_pairs_contradicting_a_silent_drive():
    observations = [(28.441, True), (239.035, False)]

    assert assign_configuration(observations, _reference_tables()) == [("B", ("0u", "0d")), ("B", ("0d", "-u"))]


def test_assign_configuration_keeps_all_consistent_candidates():
    candidates = assign_configuration([(28.441, True)], _reference_tables())

    assert candidates == [("B", ("+u", "+d")), ("B", ("0u", "0d")), ("B", ("0d", "-u")), ("B", ("+d", "0u"))]


def test_assign_configuration_rejects_contradicting_observations():
    with pytest.raises(InconsistentObservationError) as exc:
        assign_configuration([(28.441, True), (29.281, True)], _reference_tables())

    assert exc.value.details["observations"] == [[28.441, True], [29.281, True]]


def test_assign_configuration_requires_observations():
    with pytest.raises(ValueError):
        assign_configuration([], _reference_tables())


def test_rf_rules_require_forty_steps_per_period():
    with pytest.raises(ValueError):
        RFRules.validate_steps(20)


def test_rf_rules_flag_norm_drift():
    with pytest.raises(IntegrationAccuracyError):
        RFRules.validate_unitarity(np.eye(2) * 1.01)


def test_period_propagator_is_unitary():
    basis = p1_dressed_basis(FIELD, JahnTellerAxis("B"), PhysicalConstants())
    pulse = RFPulse(frequency=28.441)

    step = period_propagator(basis.energies, np.array(basis.operators[0]), pulse)

    assert np.allclose(step.conj().T @ step, np.eye(6), atol=1e-10)


def test_snapped_frequency_moves_onto_nearby_gap_only():
    jt = JahnTellerAxis("B")
    gap = nearest_gap(FIELD, jt, 28.441)

    assert snapped_frequency(FIELD, jt, gap + 0.05) == pytest.approx(gap)
    assert snapped_frequency(FIELD, jt, 400.0) == 400.0


def test_listed_frequency_check_reports_offset_to_nearest_gap():
    jt = JahnTellerAxis("B")

    rows = listed_frequency_check(FIELD, jt, [28.441, 400.0])

    assert [row["listed_MHz"] for row in rows] == [28.441, 400.0]
    assert rows[0]["nearest_gap_MHz"] == nearest_gap(FIELD, jt, 28.441)
    assert rows[1]["offset_MHz"] == pytest.approx(rows[1]["nearest_gap_MHz"] - 400.0)


def test_far_detuned_drive_leaves_every_state_in_place():
    table = truth_table(FIELD, JahnTellerAxis("A"), [400.0])

    assert table.rows[0].bits == (0, 0, 0, 0, 0, 0)
    assert table.rows[0].drive_mhz == 400.0


def test_resonant_drive_depletes_at_least_one_state():
    jt = JahnTellerAxis("B")
    gap = nearest_gap(FIELD, jt, 28.441)

    table = truth_table(FIELD, jt, [28.441])

    assert table.rows[0].drive_mhz == pytest.approx(gap)
    assert any(table.rows[0].bits)


def test_rabi_trace_starts_at_full_retention_and_thins_samples():
    times, trace = rabi_trace(FIELD, JahnTellerAxis("B"), "+d", RFPulse(frequency=400.0), samples=50)

    assert trace[0] == pytest.approx(1.0)
    assert len(times) <= 50
    assert np.all(trace > 0.95)


def test_rabi_trace_rejects_unknown_label():
    with pytest.raises(ValueError):
        rabi_trace(FIELD, JahnTellerAxis("B"), "+x", RFPulse(frequency=28.441))


def test_anchored_energies_move_only_the_claimed_transition():
    levels = np.array([0.0, 10.0, 10.05, 30.0])

    anchored = anchored_energies(levels, [10.1, 50.0])

    assert anchored[2] - anchored[0] == pytest.approx(10.1)
    assert anchored[1] == pytest.approx(10.0)
    assert anchored[3] == pytest.approx(30.0)
    assert anchored.sum() == pytest.approx(levels.sum())


def test_anchored_energies_keep_the_closer_of_two_claims():
    levels = np.array([0.0, 10.0, 10.05, 30.0])

    anchored = anchored_energies(levels, [10.03, 10.06])

    assert anchored[2] - anchored[0] == pytest.approx(10.06)
    assert np.allclose(anchored_energies(levels, []), levels)


def test_simulated_tables_reproduce_every_tabulated_row():
    service = RFService(RunContext.resolve(Settings()))

    for axis in ("A", "B", "C", "D"):
        simulated = service.simulate_table(axis)

        assert simulated.as_dict() == TruthTable.reference(axis).as_dict(), axis


def test_close_lines_keep_their_listed_spacing():
    # 177.2 and 177.125 MHz sit on transitions only ~20 kHz apart in the raw spectrum
    service = RFService(RunContext.resolve(Settings()))

    rows = service.simulate_table("D", [177.2, 177.125]).rows

    assert rows[0].bit_string == "110110"
    assert rows[1].bit_string == "010010"
    assert rows[1].drive_mhz == 177.125


def test_rf_service_assigns_from_reference_tables():
    service = RFService(RunContext.resolve(Settings()))

    rows = service.assign([(28.441, True), (239.035, False), (81.106, False)])

    assert rows == [{"jt": "B", "state_a": "0u", "state_b": "0d"}]


def test_rf_service_lists_reference_candidates_by_tau():
    rows = RFService.reference_candidates()

    assert [row["tau_us"] for row in rows] == [11.2, 14.0, 16.4, 18.6, 29.0]
    assert rows[0]["candidates"] == "+u/+d;+d/0u"
