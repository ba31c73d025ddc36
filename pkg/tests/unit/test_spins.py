import math

import numpy as np
import pytest

from app.config.settings import Subsystem
from app.domain.spins.exceptions import (
    InvalidSeparationError,
    InvalidSpinError,
    MissingGeometryError,
    NonHermitianOperatorError,
)
from app.domain.spins.hamiltonians import (
    build_composite_hamiltonian,
    build_dipolar_hamiltonian,
    build_nv_hamiltonian,
    build_p1_hamiltonian,
    dipolar_tensor,
)
from app.domain.spins.operators import as_matrices, embed, rotation_matrix, rotate_tensor, spin_operators
from app.domain.spins.value_objects import (
    DefectGeometry,
    HermitianOperator,
    JahnTellerAxis,
    MagneticField,
    PhysicalConstants,
    SphericalVector,
    electron_dipolar_prefactor,
)


def test_spin_operators_satisfy_commutation_relation_for_spin_one():
    sx, sy, sz = as_matrices(spin_operators(1))

    assert np.allclose(sx @ sy - sy @ sx, 1j * sz)
    assert np.allclose(sx @ sx + sy @ sy + sz @ sz, 2.0 * np.eye(3))


def test_spin_operators_order_highest_projection_first():
    _, _, sz = as_matrices(spin_operators(0.5))

    assert np.allclose(np.diag(sz).real, [0.5, -0.5])


def test_spin_operators_reject_unsupported_spin():
    with pytest.raises(InvalidSpinError) as exc:
        spin_operators(1.5)

    assert exc.value.details == {"s": 1.5}


def test_electron_dipolar_prefactor_matches_codata_value():
    assert electron_dipolar_prefactor() == pytest.approx(52.04, rel=1e-3)


def test_hermitian_operator_rejects_non_hermitian_matrix():
    with pytest.raises(NonHermitianOperatorError):
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_operator_storage_is_read_only():
    op = HermitianOperator(np.eye(2))

    with pytest.raises(ValueError):
        op.matrix[0, 0] = 5.0


def test_physical_constants_reject_non_axial_tensor():
    with pytest.raises(ValueError):
        PhysicalConstants(A_diag=(114.03, 81.31, 80.0))


def test_jahn_teller_axis_normalizes_and_validates_letter():
    assert JahnTellerAxis(" b ").axis == "B"

    with pytest.raises(ValueError):
        JahnTellerAxis("E")


def test_jahn_teller_mirror_flips_euler_angles():
    mirrored = JahnTellerAxis("A").mirrored()

    assert mirrored.alpha == pytest.approx(180.0)
    assert mirrored.beta == pytest.approx(70.5)
    assert str(mirrored) == "A'"


def test_rotation_matrix_is_orthogonal():
    r = rotation_matrix(240.0, 109.5)

    assert np.allclose(r @ r.T, np.eye(3))
    assert np.linalg.det(r) == pytest.approx(1.0)


def test_rotate_tensor_keeps_trace_and_symmetry():
    tensor = rotate_tensor((81.31, 81.31, 114.03), JahnTellerAxis("C"))

    assert np.trace(tensor) == pytest.approx(81.31 * 2 + 114.03)
    assert np.allclose(tensor, tensor.T)


def test_spherical_vector_wraps_azimuth_and_converts_to_cartesian():
    vec = SphericalVector(2.0, math.pi / 2, 2.0 * math.pi + 0.5)

    assert vec.phi == pytest.approx(0.5)
    assert np.allclose(vec.cartesian, [2.0 * math.cos(0.5), 2.0 * math.sin(0.5), 0.0], atol=1e-12)


def test_spherical_vector_rejects_non_positive_radius():
    with pytest.raises(ValueError):
        SphericalVector(0.0, 0.1, 0.1)


def test_defect_geometry_requires_missing_vector():
    geometry = DefectGeometry(r23=SphericalVector(5.0, 1.0, 1.0))

    with pytest.raises(MissingGeometryError) as exc:
        geometry.require_r12()

    assert exc.value.details == {"missing": "r12"}


def test_defect_geometry_swap_keeps_positions():
    geometry = DefectGeometry(SphericalVector(10.0, 1.1, 2.3), SphericalVector(7.0, 1.9, 0.8))

    swapped = geometry.swapped()

    assert np.allclose(swapped.require_r12(), geometry.require_r13())
    assert np.allclose(swapped.require_r13(), geometry.require_r12())


def test_dipolar_tensor_is_traceless_and_scales_with_inverse_cube():
    near = dipolar_tensor([0.0, 0.0, 5.0])
    far = dipolar_tensor([0.0, 0.0, 10.0])

    assert np.trace(near) == pytest.approx(0.0, abs=1e-12)
    assert near[2, 2] / far[2, 2] == pytest.approx(8.0)


def test_dipolar_tensor_rejects_zero_separation():
    with pytest.raises(InvalidSeparationError):
        dipolar_tensor([0.0, 0.0, 0.0])


def test_dipolar_hamiltonian_of_two_half_spins_along_z():
    half = spin_operators(0.5)
    r_vec = [0.0, 0.0, 2.0]

    h = build_dipolar_hamiltonian(r_vec, half, half)

    assert h.dim == 4
    assert np.trace(h.matrix) == pytest.approx(0.0, abs=1e-12)
    assert h.matrix[0, 0].real == pytest.approx(dipolar_tensor(r_vec)[2, 2] / 4.0)


def test_p1_hamiltonian_trace_comes_from_quadrupole_only():
    constants = PhysicalConstants()
    h = build_p1_hamiltonian(MagneticField(2.43, 1.42, 45.552), JahnTellerAxis("A"), constants)

    # tr(I_k I_m) on the 6-dim space is 4 delta_km
    assert h.dim == 6
    assert np.trace(h.matrix).real == pytest.approx(4.0 * sum(constants.quadrupole_principal), abs=1e-9)


def test_nv_hamiltonian_at_zero_field_splits_by_zero_field_splitting():
    h = build_nv_hamiltonian(MagneticField(0.0, 0.0, 0.0))

    assert np.allclose(np.linalg.eigvalsh(h.matrix), [0.0, 2870.0, 2870.0])


def test_embed_places_operator_on_requested_factor():
    _, _, sz = as_matrices(spin_operators(0.5))

    op = embed(sz, 1, (3, 2))

    assert op.shape == (6, 6)
    assert np.allclose(np.diag(op).real, [0.5, -0.5] * 3)


def test_composite_hamiltonian_dimensions_follow_subsystem():
    b = MagneticField(2.43, 1.42, 45.552)
    geometry = DefectGeometry(SphericalVector(11.2, 1.1, 2.3), SphericalVector(7.4, 1.9, 0.8))
    jt = JahnTellerAxis("A")

    assert build_composite_hamiltonian(b, geometry, jt, subsystem=Subsystem.P1_P1).dim == 36
    assert build_composite_hamiltonian(b, geometry, jt, subsystem=Subsystem.NV_P1).dim == 18
    assert build_composite_hamiltonian(b, geometry, jt).dim == 108


def test_composite_hamiltonian_needs_pair_vector_for_p1_pair():
    geometry = DefectGeometry(r12=SphericalVector(11.2, 1.1, 2.3))

    with pytest.raises(MissingGeometryError):
        build_composite_hamiltonian(
            MagneticField(0.0, 0.0, 45.0), geometry, JahnTellerAxis("A"), subsystem=Subsystem.P1_P1
        )
