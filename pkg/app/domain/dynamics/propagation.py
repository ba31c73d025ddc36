"""
Dynamical-decoupling propagation of the P1 pair conditioned on the NV.

The NV enters through two pair Hamiltonians: h0 for m_s = 0 and
h1 = h0 - (K1 + K2) for m_s = -1, with K_i = sum_j T_zj J_j the secular
NV-P1 field on site i. Energies are MHz and times us, so a propagator
phase is 2 pi E t.
"""

import logging
import math
from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from app.domain.spectro.couplings import JT_AXES, CouplingCalculator, resonant_tau
from app.domain.spins.hamiltonians import dipolar_tensor
from app.domain.spins.value_objects import (
    DefectGeometry,
    HermitianOperator,
    MagneticField,
    PhysicalConstants,
)
from .entities import DDSpectrumPoint
from .exceptions import DynamicsError, NoConditionalPhaseError
from .rules import MAX_CALIBRATION_UNITS, PHASE_RTOL, UNITARITY_TOLERANCE, DynamicsRules
from .value_objects import DDSequence, PhotonModel, ReadoutCalibration

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class SpectralPropagator:
    """exp(-2 pi i h t) from a single diagonalization of h."""

    def __init__(self, h):
        matrix = h.matrix if isinstance(h, HermitianOperator) else np.asarray(h, dtype=complex)
        self.energies, self.vectors = linalg.eigh(matrix)

    def at(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * TWO_PI * self.energies * t)
        return (self.vectors * phases) @ self.vectors.conj().T


def dd_unit_propagators(h0, h1, tau: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    One decoupling unit for each NV branch.

    Branch A starts in m_s = 0: U0(tau) U1(2 tau) U0(tau).
    Branch B starts in m_s = -1: U1(tau) U0(2 tau) U1(tau).
    """
    p0 = h0 if isinstance(h0, SpectralPropagator) else SpectralPropagator(h0)
    p1 = h1 if isinstance(h1, SpectralPropagator) else SpectralPropagator(h1)
    u0_tau, u1_tau = p0.at(tau), p1.at(tau)
    unit_a = u0_tau @ p1.at(2.0 * tau) @ u0_tau
    unit_b = u1_tau @ p0.at(2.0 * tau) @ u1_tau
    return unit_a, unit_b


def _sequence_propagators(h0, h1, seq: DDSequence) -> Tuple[np.ndarray, np.ndarray]:
    unit_a, unit_b = dd_unit_propagators(h0, h1, seq.tau)
    u_a = np.linalg.matrix_power(unit_a, seq.n_units)
    u_b = np.linalg.matrix_power(unit_b, seq.n_units)
    drift = np.linalg.norm(u_a.conj().T @ u_a - np.eye(len(u_a)))
    if drift > UNITARITY_TOLERANCE * len(u_a):
        raise DynamicsError(
            "Sequence propagator lost unitarity",
            details={"drift": float(drift), "tau_us": seq.tau, "n_units": seq.n_units}
        )
    return u_a, u_b


def coherence_signals(h_ms0, h_ms1, states: np.ndarray, seq: DDSequence) -> np.ndarray:
    """Fidelity (1 + Re<psi_A|psi_B>)/2 for every column of states."""
    u_a, u_b = _sequence_propagators(h_ms0, h_ms1, seq)
    psi_a = u_a @ states
    psi_b = u_b @ states
    overlaps = np.einsum("ij,ij->j", psi_a.conj(), psi_b)
    return np.clip((1.0 + overlaps.real) / 2.0, 0.0, 1.0)


def nv_coherence_signal(h_ms0, h_ms1, initial_state, seq: DDSequence) -> float:
    """
    NV decoupling fidelity for one pair state.

    Raises:
        NonUnitStateError: If initial_state is not normalized
    """
    state = DynamicsRules.validate_unit_state(initial_state)
    return float(coherence_signals(h_ms0, h_ms1, state[:, None], seq)[0])


def secular_pair_hamiltonians(
    calculator: CouplingCalculator,
    r12,
    r23,
    jt1,
    jt2=None,
) -> Tuple[np.ndarray, np.ndarray]:
    """h0 (m_s = 0) and h1 (m_s = -1) in the dressed P1-P1 product basis."""
    p1 = calculator.p1_basis(jt1, 0)
    p2 = calculator.p1_basis(jt2 or jt1, 1)
    r12 = np.asarray(r12, dtype=float)
    r13 = r12 + np.asarray(r23, dtype=float)
    k1 = np.einsum("m,mpq->pq", dipolar_tensor(r12, calculator.constants)[2], p1.operators)
    k2 = np.einsum("m,mpq->pq", dipolar_tensor(r13, calculator.constants)[2], p2.operators)
    h0 = calculator.pair_hamiltonian(r23, jt1, jt2)
    h1 = h0 - np.kron(k1, np.eye(p2.dim)) - np.kron(np.eye(p1.dim), k2)
    return h0, h1


def pseudo_spin_hamiltonians(x_khz: float, z_khz: float) -> Tuple[np.ndarray, np.ndarray]:
    """Two-level H = X Sx + m_s Z Sz for m_s = 0 and -1, in MHz."""
    sx = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
    sz = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
    x, z = x_khz / 1000.0, z_khz / 1000.0
    return x * sx, x * sx - z * sz


def conditional_phase(x_khz: float, z_khz: float, tau: float, n_units: int) -> float:
    """Conditional phase arccos(Re tr(U_A^dag U_B) / 2) of the pseudo-spin, in rad."""
    h0, h1 = pseudo_spin_hamiltonians(x_khz, z_khz)
    u_a, u_b = _sequence_propagators(h0, h1, DDSequence(tau, n_units))
    trace = np.trace(u_a.conj().T @ u_b).real / 2.0
    return float(math.acos(max(-1.0, min(1.0, trace))))


def _first_unit_near(phases: np.ndarray, target: float, rtol: float) -> Tuple[int, bool]:
    errors = np.abs(phases - target) / target
    hits = np.flatnonzero(errors <= rtol)
    if hits.size:
        return int(hits[0]) + 1, True
    return int(np.argmin(errors)) + 1, False


def readout_calibration(
    x_khz: float,
    z_khz: float,
    tau: Optional[float] = None,
    n_max: int = MAX_CALIBRATION_UNITS,
    rtol: float = PHASE_RTOL,
) -> ReadoutCalibration:
    """
    Smallest unit counts giving conditional phase pi/2 (spin readout) and
    pi (parity readout) at the resonant tau.

    Raises:
        NoConditionalPhaseError: If Z = 0
    """
    if z_khz == 0.0:
        raise NoConditionalPhaseError(
            "Detuning is zero, the sequence accumulates no conditional phase",
            details={"X_kHz": x_khz, "Z_kHz": z_khz}
        )
    tau = tau if tau is not None else resonant_tau(x_khz, z_khz)
    h0, h1 = pseudo_spin_hamiltonians(x_khz, z_khz)
    unit_a, unit_b = dd_unit_propagators(h0, h1, tau)

    phases = np.empty(n_max)
    u_a = np.eye(2, dtype=complex)
    u_b = np.eye(2, dtype=complex)
    for n in range(n_max):
        u_a = unit_a @ u_a
        u_b = unit_b @ u_b
        trace = np.trace(u_a.conj().T @ u_b).real / 2.0
        phases[n] = math.acos(max(-1.0, min(1.0, trace)))

    n_spin, spin_ok = _first_unit_near(phases, math.pi / 2.0, rtol)
    n_parity, parity_ok = _first_unit_near(phases, math.pi, rtol)
    if not spin_ok or not parity_ok:
        logger.warning(
            f"Readout calibration missed tolerance {rtol:.0%} within {n_max} units "
            f"(spin ok: {spin_ok}, parity ok: {parity_ok}); using closest unit counts"
        )
    return ReadoutCalibration(
        tau=tau,
        n_spin=n_spin,
        n_parity=n_parity,
        phase_spin=float(phases[n_spin - 1]),
        phase_parity=float(phases[n_parity - 1]),
    )


def jt_pairs(same_axis_only: bool = False) -> List[Tuple[str, str]]:
    """Ordered JT combinations of the two P1 centers."""
    if same_axis_only:
        return [(axis, axis) for axis in JT_AXES]
    return list(product(JT_AXES, JT_AXES))


def dd_spectrum(
    b: MagneticField,
    geometry: DefectGeometry,
    tau_grid: Iterable[float],
    n_units: int,
    photon: PhotonModel,
    rng: np.random.Generator,
    constants: Optional[PhysicalConstants] = None,
    pairs: Optional[Sequence[Tuple[str, str]]] = None,
) -> List[DDSpectrumPoint]:
    """
    Decoupling spectrum averaged uniformly over JT pairs and pair eigenstates.

    Each point carries the per-JT-pair mean fidelity, the expected and
    binomially sampled counts of the mixture, and the sampled counts mapped
    back to the fidelity scale.
    """
    calculator = CouplingCalculator(b, constants)
    r12 = geometry.require_r12()
    r23 = geometry.require_r23()
    pairs = list(pairs or jt_pairs())

    prepared = []
    for jt1, jt2 in pairs:
        h0, h1 = secular_pair_hamiltonians(calculator, r12, r23, jt1, jt2)
        p0, p1 = SpectralPropagator(h0), SpectralPropagator(h1)
        prepared.append((f"{jt1}{jt2}", p0, p1, p0.vectors))

    points = []
    for tau in tau_grid:
        seq = DDSequence(float(tau), n_units)
        pair_fidelities = {}
        for name, p0, p1, states in prepared:
            pair_fidelities[name] = float(np.mean(coherence_signals(p0, p1, states, seq)))
        mean_fidelity = float(np.mean(list(pair_fidelities.values())))
        sampled = float(photon.sample_counts(mean_fidelity, rng))
        points.append(DDSpectrumPoint(
            tau=seq.tau,
            mean_fidelity=mean_fidelity,
            expected_counts=float(photon.expected_counts(mean_fidelity)),
            sampled_counts=sampled,
            normalized_signal=float(photon.normalized_signal(sampled)),
            pair_fidelities=pair_fidelities,
        ))
    logger.info(f"Simulated DD spectrum over {len(points)} tau values and {len(pairs)} JT pairs")
    return points
