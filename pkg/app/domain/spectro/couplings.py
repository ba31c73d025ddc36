"""
Effective couplings of the NV-P1-P1 system.

All composite Hamiltonians here are assembled in the product of the
single-defect eigenbases (dressed bases): single-defect energies sit on the
diagonal and the dipolar terms are transformed operator products. This is
the same Hamiltonian as the bare-basis construction, expressed so that
product eigenstate labels are the basis labels.

Energies are MHz; every returned coupling is kHz.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from app.config.constants import NV_LABELS, ORDERED_PAIR_CONFIGURATIONS
from app.domain.spins.hamiltonians import dipolar_tensor
from app.domain.spins.value_objects import (
    DefectGeometry,
    HermitianOperator,
    JahnTellerAxis,
    MagneticField,
    PhysicalConstants,
    SphericalVector,
)
from .eigensystems import labeled_eigensystem, nv_dressed_basis, p1_dressed_basis
from .exceptions import NoFlipFlopError, NoResonanceError
from .rules import AXIS_EQUIVALENCE_TOL, FLIP_FLOP_MIN_OVERLAP, RESONANCE_RTOL, SpectroRules
from .value_objects import DressedBasis, EffectiveCouplings

logger = logging.getLogger(__name__)

JT_AXES = ("A", "B", "C", "D")
NITROGEN_PROJECTIONS = (1, 0, -1)
MHZ_TO_KHZ = 1000.0

_NITROGEN_PREFIX = {1: "+", 0: "0", -1: "-"}
_NV_INDEX = {1: NV_LABELS.index("+1"), 0: NV_LABELS.index("0"), -1: NV_LABELS.index("-1")}


def fixed_nitrogen_states(m_I: int) -> Tuple[str, str]:
    """The (up, down) electron pair at a fixed nitrogen projection."""
    if m_I not in _NITROGEN_PREFIX:
        raise ValueError(f"Invalid nitrogen projection: {m_I}")
    prefix = _NITROGEN_PREFIX[m_I]
    return f"{prefix}u", f"{prefix}d"


def _as_axis(jt) -> JahnTellerAxis:
    return jt if isinstance(jt, JahnTellerAxis) else JahnTellerAxis(str(jt))


def _pair_operator(tensor: np.ndarray, ops_a: np.ndarray, ops_b: np.ndarray) -> np.ndarray:
    """sum_km T_km kron(a_k, b_m) as a 4-index array (i, p, j, q)."""
    return np.einsum("km,kij,mpq->ipjq", tensor, ops_a, ops_b)


def pair_subspace_splitting(
    h,
    index_a: int,
    index_b: int,
    min_overlap: float = FLIP_FLOP_MIN_OVERLAP,
) -> float:
    """
    Splitting (kHz) of the two eigenstates carrying most weight on
    span{|index_a>, |index_b>}.

    Raises:
        NoFlipFlopError: If either eigenstate has weight below min_overlap
    """
    matrix = h.matrix if isinstance(h, HermitianOperator) else np.asarray(h)
    eigenvalues, vectors = linalg.eigh(matrix)
    weights = np.abs(vectors[index_a]) ** 2 + np.abs(vectors[index_b]) ** 2
    first, second = np.argsort(-weights, kind="stable")[:2]
    if weights[second] < min_overlap:
        raise NoFlipFlopError(
            "Two-state subspace is not isolated in the spectrum",
            details={"weights": [float(weights[first]), float(weights[second])], "min_overlap": min_overlap}
        )
    return abs(float(eigenvalues[first] - eigenvalues[second])) * MHZ_TO_KHZ


class CouplingCalculator:
    """
    Couplings at one magnetic field with cached single-defect bases.

    site_fields optionally gives each P1 its own field; the NV always sees b.
    """

    def __init__(
        self,
        b: MagneticField,
        constants: Optional[PhysicalConstants] = None,
        site_fields: Optional[Tuple[MagneticField, MagneticField]] = None,
        min_overlap: float = FLIP_FLOP_MIN_OVERLAP,
        secular_nv: bool = False,
    ):
        self.b = b
        self.constants = constants or PhysicalConstants()
        self.site_fields = site_fields or (b, b)
        self.min_overlap = min_overlap
        self.secular_nv = secular_nv

    def p1_basis(self, jt, site: int = 0) -> DressedBasis:
        return p1_dressed_basis(self.site_fields[site], _as_axis(jt), self.constants)

    def nv_basis(self) -> DressedBasis:
        return nv_dressed_basis(self.b, self.constants)

    # P1-P1

    def pair_hamiltonian(self, r23, jt1, jt2=None) -> np.ndarray:
        """36-dim P1-P1 Hamiltonian in the dressed product basis."""
        p1 = self.p1_basis(jt1, 0)
        p2 = self.p1_basis(jt2 or jt1, 1)
        tensor = dipolar_tensor(r23, self.constants)
        dim = p1.dim * p2.dim
        h = _pair_operator(tensor, p1.operators, p2.operators).reshape(dim, dim)
        h = h + np.diag((p1.energies[:, None] + p2.energies[None, :]).ravel())
        return h

    def flip_flop(self, r23, jt, state_a: str, state_b: str, jt2=None) -> float:
        """
        X = lambda_sym - lambda_antisym (kHz) for the flip-flop |a b> <-> |b a>.

        The symmetric target is (|a b> + u |b a>)/sqrt(2) with u the phase of
        the direct coupling element folded onto Re u >= 0; for equal JT axes
        u = 1.

        Raises:
            NoFlipFlopError: If the targets do not map onto two distinct eigenstates
        """
        if state_a == state_b:
            raise NoFlipFlopError(
                "Flip-flop needs two different states",
                details={"state_a": state_a, "state_b": state_b}
            )
        p1 = self.p1_basis(jt, 0)
        p2 = self.p1_basis(jt2 or jt, 1)
        h = self.pair_hamiltonian(r23, jt, jt2)
        index_ab = p1.index(state_a) * p2.dim + p2.index(state_b)
        index_ba = p1.index(state_b) * p2.dim + p2.index(state_a)

        c = h[index_ab, index_ba]
        u = np.conj(c) / abs(c) if abs(c) > 0.0 else 1.0 + 0.0j
        if u.real < 0.0:
            u = -u

        eigenvalues, vectors = linalg.eigh(h)
        overlap_plus = np.abs(vectors[index_ab] + np.conj(u) * vectors[index_ba]) ** 2 / 2.0
        overlap_minus = np.abs(vectors[index_ab] - np.conj(u) * vectors[index_ba]) ** 2 / 2.0
        j_plus = int(np.argmax(overlap_plus))
        j_minus = int(np.argmax(overlap_minus))
        if j_plus == j_minus or min(overlap_plus[j_plus], overlap_minus[j_minus]) < self.min_overlap:
            raise NoFlipFlopError(
                f"States {state_a} and {state_b} do not form a flip-flop pair",
                details={
                    "state_a": state_a,
                    "state_b": state_b,
                    "jt": str(jt),
                    "overlap_sym": float(overlap_plus[j_plus]),
                    "overlap_antisym": float(overlap_minus[j_minus]),
                }
            )
        return float(eigenvalues[j_plus] - eigenvalues[j_minus]) * MHZ_TO_KHZ

    # NV-P1

    def nv_p1_hamiltonian(self, r12, jt, site: int = 0) -> np.ndarray:
        """18-dim NV-P1 Hamiltonian in the dressed product basis."""
        nv = self.nv_basis()
        p1 = self.p1_basis(jt, site)
        tensor = dipolar_tensor(r12, self.constants)
        if self.secular_nv:
            tensor = np.vstack([np.zeros((2, 3)), tensor[2:3]])
        dim = nv.dim * p1.dim
        h = _pair_operator(tensor, nv.operators, p1.operators).reshape(dim, dim)
        h = h + np.diag((nv.energies[:, None] + p1.energies[None, :]).ravel())
        return h

    def nv_coupling(self, r12, jt, state_a: str, state_b: str, site: int = 0) -> float:
        """
        D = (lambda(-1, b) - lambda(-1, a)) + (lambda(0, a) - lambda(0, b)) in kHz.

        Raises:
            DegenerateLabelingError: If a needed product label is ambiguous
        """
        nv = self.nv_basis()
        p1 = self.p1_basis(jt, site)
        labels = [f"{n}|{p}" for n in nv.labels for p in p1.labels]
        system = labeled_eigensystem(self.nv_p1_hamiltonian(r12, jt, site), labels)
        d = (system.energy(f"-1|{state_b}") - system.energy(f"-1|{state_a}")) + (
            system.energy(f"0|{state_a}") - system.energy(f"0|{state_b}")
        )
        return d * MHZ_TO_KHZ

    def secular_nv_coupling(self, r12, jt, state_a: str, state_b: str, site: int = 0) -> float:
        """First-order D = K_aa - K_bb with K = sum_j T_zj J_j in the P1 eigenbasis (kHz)."""
        p1 = self.p1_basis(jt, site)
        tensor = dipolar_tensor(r12, self.constants)
        k = np.einsum("m,mpq->pq", tensor[2], p1.operators)
        i, j = p1.index(state_a), p1.index(state_b)
        return float((k[i, i] - k[j, j]).real) * MHZ_TO_KHZ

    # NV-P1-P1

    def full_hamiltonian(self, r12, r23, jt1, jt2=None) -> np.ndarray:
        """108-dim NV-P1-P1 Hamiltonian in the dressed product basis."""
        nv = self.nv_basis()
        p1 = self.p1_basis(jt1, 0)
        p2 = self.p1_basis(jt2 or jt1, 1)
        r12 = np.asarray(r12, dtype=float)
        r13 = r12 + np.asarray(r23, dtype=float)
        eye_nv = np.eye(nv.dim)
        eye_p = np.eye(p1.dim)

        t12 = dipolar_tensor(r12, self.constants)
        t13 = dipolar_tensor(r13, self.constants)
        if self.secular_nv:
            t12 = np.vstack([np.zeros((2, 3)), t12[2:3]])
            t13 = np.vstack([np.zeros((2, 3)), t13[2:3]])

        h = np.einsum("iajc,bd->iabjcd", _pair_operator(t12, nv.operators, p1.operators), eye_p)
        h = h + np.einsum("ibjd,ac->iabjcd", _pair_operator(t13, nv.operators, p2.operators), eye_p)
        h = h + np.einsum(
            "abcd,ij->iabjcd",
            _pair_operator(dipolar_tensor(r23, self.constants), p1.operators, p2.operators),
            eye_nv,
        )
        dim = nv.dim * p1.dim * p2.dim
        h = h.reshape(dim, dim)
        energies = (
            nv.energies[:, None, None] + p1.energies[None, :, None] + p2.energies[None, None, :]
        ).ravel()
        return h + np.diag(energies)

    def full_system_frequencies(self, r12, r23, jt, state_a: str, state_b: str, jt2=None) -> Dict[str, float]:
        """Pseudo-spin splittings at m_s = 0 and -1 from the 108-dim Hamiltonian, and |Z|."""
        p1 = self.p1_basis(jt, 0)
        p2 = self.p1_basis(jt2 or jt, 1)
        h = self.full_hamiltonian(r12, r23, jt, jt2)
        block = p1.dim * p2.dim

        def index(m_s: int, first: str, second: str) -> int:
            return _NV_INDEX[m_s] * block + p1.index(first) * p2.dim + p2.index(second)

        f_ms0 = pair_subspace_splitting(h, index(0, state_a, state_b), index(0, state_b, state_a), self.min_overlap)
        f_ms1 = pair_subspace_splitting(h, index(-1, state_a, state_b), index(-1, state_b, state_a), self.min_overlap)
        return {"f_ms0_kHz": f_ms0, "f_ms1_kHz": f_ms1, "Z_kHz": math.sqrt(max(f_ms1 ** 2 - f_ms0 ** 2, 0.0))}

    # Combined

    def couplings(self, r12, r23, jt, state_a: str, state_b: str, m_I: Optional[int] = None) -> EffectiveCouplings:
        """X, Z, D1 and D2 for a geometry given as Cartesian vectors."""
        r13 = np.asarray(r12, dtype=float) + np.asarray(r23, dtype=float)
        x = self.flip_flop(r23, jt, state_a, state_b)
        d1 = self.nv_coupling(r12, jt, state_a, state_b, site=0)
        d2 = self.nv_coupling(r13, jt, state_a, state_b, site=1)
        return EffectiveCouplings(
            jt=_as_axis(jt),
            m_I=m_I,
            flip_flop_states=(state_a, state_b),
            X=x,
            Z=d1 - d2,
            D1=d1,
            D2=d2,
        )


def nv_p1_effective_coupling(
    b: MagneticField,
    r12: SphericalVector,
    jt: JahnTellerAxis,
    m_I: int,
    constants: Optional[PhysicalConstants] = None,
    secular_nv: bool = False,
) -> float:
    """NV-P1 effective coupling D (kHz) for the electron pair at nitrogen projection m_I."""
    state_a, state_b = fixed_nitrogen_states(m_I)
    calculator = CouplingCalculator(b, constants, secular_nv=secular_nv)
    return calculator.nv_coupling(r12.cartesian, jt, state_a, state_b)


def p1_pair_flip_flop_coupling(
    b: MagneticField,
    r23: SphericalVector,
    jt: JahnTellerAxis,
    state_a: str,
    state_b: str,
    constants: Optional[PhysicalConstants] = None,
    jt2: Optional[JahnTellerAxis] = None,
) -> float:
    """Flip-flop coupling X (kHz) of a P1 pair."""
    return CouplingCalculator(b, constants).flip_flop(r23.cartesian, jt, state_a, state_b, jt2)


def detuning(
    b: MagneticField,
    geometry: DefectGeometry,
    jt: JahnTellerAxis,
    m_I: int,
    flip_flop_states: Optional[Tuple[str, str]] = None,
    constants: Optional[PhysicalConstants] = None,
    secular_nv: bool = False,
) -> float:
    """
    Pseudo-spin detuning Z = D1 - D2 (kHz).

    Raises:
        MissingGeometryError: If r12 or r23 is absent
    """
    state_a, state_b = flip_flop_states or fixed_nitrogen_states(m_I)
    calculator = CouplingCalculator(b, constants, secular_nv=secular_nv)
    d1 = calculator.nv_coupling(geometry.require_r12(), jt, state_a, state_b, site=0)
    d2 = calculator.nv_coupling(geometry.require_r13(), jt, state_a, state_b, site=1)
    return d1 - d2


def effective_couplings(
    b: MagneticField,
    geometry: DefectGeometry,
    jt: JahnTellerAxis,
    flip_flop_states: Tuple[str, str],
    constants: Optional[PhysicalConstants] = None,
    m_I: Optional[int] = None,
) -> EffectiveCouplings:
    calculator = CouplingCalculator(b, constants)
    return calculator.couplings(
        geometry.require_r12(), geometry.require_r23(), jt, flip_flop_states[0], flip_flop_states[1], m_I
    )


def full_system_detuning(
    b: MagneticField,
    geometry: DefectGeometry,
    jt: JahnTellerAxis,
    flip_flop_states: Tuple[str, str],
    constants: Optional[PhysicalConstants] = None,
) -> Dict[str, float]:
    """|Z| = sqrt(f(-1)^2 - f(0)^2) from the full 108-dim Hamiltonian."""
    calculator = CouplingCalculator(b, constants)
    return calculator.full_system_frequencies(
        geometry.require_r12(), geometry.require_r23(), jt, flip_flop_states[0], flip_flop_states[1]
    )


def pseudo_spin_frequency(x_khz: float, z_khz: float, m_s: int) -> float:
    """Precession frequency sqrt(X^2 + (m_s Z)^2) of the pseudo-spin (kHz)."""
    if m_s not in (1, 0, -1):
        raise ValueError(f"Invalid NV projection: {m_s}")
    return math.hypot(x_khz, m_s * z_khz)


def resonant_tau(x_khz: float, z_khz: float) -> float:
    """
    First decoupling resonance tau = 1/(4 f_r) in us, f_r = sqrt(X^2 + (Z/2)^2).

    Raises:
        NoResonanceError: If X = 0
    """
    SpectroRules.validate_coupling(x_khz)
    f_r = math.hypot(x_khz, z_khz / 2.0)
    return 1000.0 / (4.0 * f_r)


def implied_detuning(f_ms0_khz: float, f_ms1_khz: float) -> float:
    """|Z| = sqrt(f(-1)^2 - f(0)^2) from a measured pair of pseudo-spin frequencies."""
    SpectroRules.validate_frequency_pair(f_ms0_khz, f_ms1_khz)
    return math.sqrt(f_ms1_khz ** 2 - f_ms0_khz ** 2)


def equivalent_axes(b: MagneticField, jt1, jt2, tol: float = AXIS_EQUIVALENCE_TOL) -> bool:
    """Whether two JT axes make the same angle with the field (same axis always does)."""
    jt1, jt2 = _as_axis(jt1), _as_axis(jt2)
    if jt1.axis == jt2.axis:
        return True
    magnitude = b.magnitude
    if magnitude == 0.0:
        return False
    b_hat = b.vector / magnitude
    return abs(abs(float(b_hat @ jt1.direction)) - abs(float(b_hat @ jt2.direction))) <= tol


def resonant_configuration_fraction(
    b: MagneticField,
    r23: SphericalVector,
    target: Tuple[str, int] = ("A", 0),
    rtol: float = RESONANCE_RTOL,
    constants: Optional[PhysicalConstants] = None,
    axes: Sequence[str] = JT_AXES,
) -> Dict[str, float]:
    """
    Share of ordered two-P1 configurations resonant with a target coupling.

    A pair (jt1, jt2) at a common m_I is degenerate when the axes are
    equivalent with respect to the field; it counts when its |X| lies
    within rtol of the target's |X|, once per electron ordering. The total
    is the 576 ordered (JT x m_I x electron)^2 configurations.
    """
    calculator = CouplingCalculator(b, constants)
    r = r23.cartesian
    target_jt, target_m_i = target
    x_target = abs(calculator.flip_flop(r, target_jt, *fixed_nitrogen_states(target_m_i)))

    resonant = 0
    for jt1 in axes:
        for jt2 in axes:
            if not equivalent_axes(b, jt1, jt2):
                continue
            for m_i in NITROGEN_PROJECTIONS:
                state_a, state_b = fixed_nitrogen_states(m_i)
                try:
                    x = abs(calculator.flip_flop(r, jt1, state_a, state_b, None if jt2 == jt1 else jt2))
                except NoFlipFlopError:
                    continue
                if abs(x - x_target) <= rtol * x_target:
                    resonant += 2
    fraction = resonant / ORDERED_PAIR_CONFIGURATIONS
    logger.info(
        f"Resonant configurations at |B| = {b.magnitude:.1f} G: "
        f"{resonant}/{ORDERED_PAIR_CONFIGURATIONS} ({fraction:.5f})"
    )
    return {
        "target_X_kHz": x_target,
        "resonant": resonant,
        "total": ORDERED_PAIR_CONFIGURATIONS,
        "fraction": fraction,
    }


def configuration_table(
    b: MagneticField,
    geometry: DefectGeometry,
    state_pairs: Sequence[Tuple[str, str]] = None,
    constants: Optional[PhysicalConstants] = None,
):
    """
    EffectiveCouplings over 4 JT axes x 3 m_I values.

    With state_pairs omitted each row uses the fixed-nitrogen pair of its m_I;
    otherwise every listed pair is evaluated once per axis. Pairs that do not
    flip-flop are skipped.
    """
    calculator = CouplingCalculator(b, constants)
    r12 = geometry.require_r12()
    r23 = geometry.require_r23()
    rows = []
    if state_pairs:
        jobs = [(None, pair) for pair in state_pairs]
    else:
        jobs = [(m_i, fixed_nitrogen_states(m_i)) for m_i in NITROGEN_PROJECTIONS]
    for axis in JT_AXES:
        jt = JahnTellerAxis(axis)
        for m_i, (state_a, state_b) in jobs:
            try:
                rows.append(calculator.couplings(r12, r23, jt, state_a, state_b, m_i))
            except NoFlipFlopError as exc:
                logger.debug(f"Skipping {axis} {state_a}/{state_b}: {exc.message}")
    return rows



def ramsey_table(rows: Sequence[EffectiveCouplings]) -> List[Dict[str, float]]:
    """Pseudo-spin frequencies at m_s = 0 and -1 plus the resonant tau for each configuration."""
    table = []
    for row in rows:
        try:
            tau = resonant_tau(row.X, row.Z)
        except NoResonanceError:
            tau = float("inf")
        table.append({
            "jt": str(row.jt),
            "m_I": row.m_I,
            "state_a": row.flip_flop_states[0],
            "state_b": row.flip_flop_states[1],
            "X_kHz": row.X,
            "Z_kHz": row.Z,
            "D1_kHz": row.D1,
            "D2_kHz": row.D2,
            "f_ms0_kHz": pseudo_spin_frequency(row.X, row.Z, 0),
            "f_ms1_kHz": pseudo_spin_frequency(row.X, row.Z, -1),
            "tau_us": tau,
        })
    return table
