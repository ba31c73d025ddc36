"""Hamiltonian builders for the NV-P1-P1 system and its subsystems.

Units are MHz (h = 1), Gauss and nm. Single-P1 basis ordering is
|m_I = +1, 0, -1> (outer) x |up, down> (inner); the NV basis is m_s = +1, 0, -1.
Composite spaces are ordered NV, P1 one, P1 two.
"""

import logging
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from app.config.settings import Subsystem
from .exceptions import InvalidSeparationError
from .operators import as_matrices, embed, rotate_tensor, spin_operators
from .value_objects import (
    DefectGeometry,
    HermitianOperator,
    JahnTellerAxis,
    MagneticField,
    PhysicalConstants,
)

logger = logging.getLogger(__name__)

P1_DIM = 6
NV_DIM = 3


@lru_cache(maxsize=None)
def _p1_operator_arrays() -> Tuple[Tuple[np.ndarray, ...], Tuple[np.ndarray, ...]]:
    nuclear = as_matrices(spin_operators(1))
    electron = as_matrices(spin_operators(0.5))
    eye2 = np.eye(2, dtype=complex)
    eye3 = np.eye(3, dtype=complex)
    i_ops = tuple(np.kron(op, eye2) for op in nuclear)
    j_ops = tuple(np.kron(eye3, op) for op in electron)
    return i_ops, j_ops


def p1_electron_operators() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Electron spin operators J on the 6-dim single-P1 space."""
    return _p1_operator_arrays()[1]


def p1_nuclear_operators() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nitrogen spin operators I on the 6-dim single-P1 space."""
    return _p1_operator_arrays()[0]


def nv_spin_operators() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return as_matrices(spin_operators(1))


def build_p1_hamiltonian(
    b: MagneticField,
    jt: JahnTellerAxis,
    constants: Optional[PhysicalConstants] = None,
) -> HermitianOperator:
    """H = gamma_e B.J + gamma_n B.I + J.A.I + I.P.I on the 6-dim P1 space."""
    constants = constants or PhysicalConstants()
    i_ops, j_ops = _p1_operator_arrays()
    a_tensor = rotate_tensor(constants.hyperfine_principal, jt)
    p_tensor = rotate_tensor(constants.quadrupole_principal, jt)
    field = b.vector

    h = np.zeros((P1_DIM, P1_DIM), dtype=complex)
    for k in range(3):
        h += constants.gamma_e * field[k] * j_ops[k]
        h += constants.gamma_n * field[k] * i_ops[k]
    for k in range(3):
        for m in range(3):
            if a_tensor[k, m] != 0.0:
                h += a_tensor[k, m] * (j_ops[k] @ i_ops[m])
            if p_tensor[k, m] != 0.0:
                h += p_tensor[k, m] * (i_ops[k] @ i_ops[m])
    return HermitianOperator(h)


def build_nv_hamiltonian(
    b: MagneticField,
    constants: Optional[PhysicalConstants] = None,
) -> HermitianOperator:
    """H = Delta Sz^2 + gamma_e B.S for the NV spin-1."""
    constants = constants or PhysicalConstants()
    sx, sy, sz = nv_spin_operators()
    h = constants.zfs_delta * (sz @ sz)
    h = h + constants.gamma_e * (b.bx * sx + b.by * sy + b.bz * sz)
    return HermitianOperator(h)


def dipolar_tensor(r_vec, constants: Optional[PhysicalConstants] = None) -> np.ndarray:
    """
    Coupling matrix T with H = sum_ij T_ij a_i b_j.

    T = D(r) (3 r_hat r_hat^T - 1), D(r) = -prefactor / r^3.

    Raises:
        InvalidSeparationError: If the separation is zero
    """
    constants = constants or PhysicalConstants()
    r_vec = np.asarray(r_vec, dtype=float)
    r = float(np.linalg.norm(r_vec))
    if r == 0.0:
        raise InvalidSeparationError("Dipolar coupling needs a nonzero separation", details={"r_nm": r})
    r_hat = r_vec / r
    d = -constants.dipolar_prefactor / r ** 3
    return d * (3.0 * np.outer(r_hat, r_hat) - np.eye(3))


def build_dipolar_hamiltonian(
    r_vec,
    ops_a,
    ops_b,
    constants: Optional[PhysicalConstants] = None,
) -> HermitianOperator:
    """Full dipole-dipole Hamiltonian on (space of a) x (space of b)."""
    tensor = dipolar_tensor(r_vec, constants)
    a = as_matrices(ops_a)
    b = as_matrices(ops_b)
    h = np.zeros((a[0].shape[0] * b[0].shape[0],) * 2, dtype=complex)
    for k in range(3):
        for m in range(3):
            if tensor[k, m] != 0.0:
                h += tensor[k, m] * np.kron(a[k], b[m])
    return HermitianOperator(h)


def _pair_term(tensor: np.ndarray, ops_a, ops_b) -> np.ndarray:
    h = np.zeros_like(ops_a[0])
    for k in range(3):
        for m in range(3):
            if tensor[k, m] != 0.0:
                h = h + tensor[k, m] * (ops_a[k] @ ops_b[m])
    return h


def _secular_nv_term(tensor: np.ndarray, nv_sz: np.ndarray, ops_p1) -> np.ndarray:
    """Keep only the NV Sz part: Sz (T_zx Jx + T_zy Jy + T_zz Jz)."""
    h = np.zeros_like(nv_sz)
    for m in range(3):
        if tensor[2, m] != 0.0:
            h = h + tensor[2, m] * (nv_sz @ ops_p1[m])
    return h


def build_composite_hamiltonian(
    b: MagneticField,
    geometry: DefectGeometry,
    jt1: JahnTellerAxis,
    jt2: Optional[JahnTellerAxis] = None,
    subsystem: Subsystem = Subsystem.NV_P1_P1,
    secular_nv: bool = False,
    constants: Optional[PhysicalConstants] = None,
    site_fields: Optional[Tuple[MagneticField, MagneticField]] = None,
) -> HermitianOperator:
    """
    Sum of single-defect terms and pairwise electron dipolar terms.

    site_fields optionally gives each P1 its own field (the NV keeps b).

    Raises:
        MissingGeometryError: If a separation vector needed by the subsystem is absent
    """
    constants = constants or PhysicalConstants()
    subsystem = Subsystem(subsystem)
    jt2 = jt2 or jt1
    b1, b2 = site_fields if site_fields is not None else (b, b)
    _, j_p1 = _p1_operator_arrays()

    if subsystem == Subsystem.P1_P1:
        dims = (P1_DIM, P1_DIM)
        r23 = geometry.require_r23()
        h = embed(build_p1_hamiltonian(b1, jt1, constants).matrix, 0, dims)
        h = h + embed(build_p1_hamiltonian(b2, jt2, constants).matrix, 1, dims)
        j1 = [embed(op, 0, dims) for op in j_p1]
        j2 = [embed(op, 1, dims) for op in j_p1]
        h = h + _pair_term(dipolar_tensor(r23, constants), j1, j2)
        return HermitianOperator(h)

    nv_ops = nv_spin_operators()
    if subsystem == Subsystem.NV_P1:
        dims = (NV_DIM, P1_DIM)
        r12 = geometry.require_r12()
        h = embed(build_nv_hamiltonian(b, constants).matrix, 0, dims)
        h = h + embed(build_p1_hamiltonian(b1, jt1, constants).matrix, 1, dims)
        s = [embed(op, 0, dims) for op in nv_ops]
        j1 = [embed(op, 1, dims) for op in j_p1]
        t12 = dipolar_tensor(r12, constants)
        h = h + (_secular_nv_term(t12, s[2], j1) if secular_nv else _pair_term(t12, s, j1))
        return HermitianOperator(h)

    dims = (NV_DIM, P1_DIM, P1_DIM)
    r12 = geometry.require_r12()
    r23 = geometry.require_r23()
    r13 = r12 + r23
    h = embed(build_nv_hamiltonian(b, constants).matrix, 0, dims)
    h = h + embed(build_p1_hamiltonian(b1, jt1, constants).matrix, 1, dims)
    h = h + embed(build_p1_hamiltonian(b2, jt2, constants).matrix, 2, dims)
    s = [embed(op, 0, dims) for op in nv_ops]
    j1 = [embed(op, 1, dims) for op in j_p1]
    j2 = [embed(op, 2, dims) for op in j_p1]
    t12 = dipolar_tensor(r12, constants)
    t13 = dipolar_tensor(r13, constants)
    if secular_nv:
        h = h + _secular_nv_term(t12, s[2], j1) + _secular_nv_term(t13, s[2], j2)
    else:
        h = h + _pair_term(t12, s, j1) + _pair_term(t13, s, j2)
    h = h + _pair_term(dipolar_tensor(r23, constants), j1, j2)
    logger.debug(f"Built {subsystem.value} Hamiltonian of dimension {h.shape[0]}")
    return HermitianOperator(h)
