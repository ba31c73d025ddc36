"""
Lab-frame RF drive of a single P1 center.

H(t) = H_P1 + Omega cos(2 pi f t + phi) (Jx + (gamma_n/gamma_e) Ix), integrated
in the P1 eigenbasis with piecewise-constant midpoint steps. The drive is
periodic, so one period propagator is built and raised to successive powers.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from app.config.constants import P1_LABELS, TRUTH_TABLE_COLUMNS
from app.domain.spectro.eigensystems import (
    p1_dressed_basis,
    p1_nuclear_dressed_operators,
    transition_gaps,
)
from app.domain.spins.value_objects import JahnTellerAxis, MagneticField, PhysicalConstants
from .rules import (
    ANCHOR_RESIDUAL_MHZ,
    ANCHOR_TOLERANCE_MHZ,
    ANCHOR_WINDOW_MHZ,
    MIN_STEPS_PER_PERIOD,
    NORM_TOLERANCE,
    RETENTION_THRESHOLD,
    SNAP_TOLERANCE_MHZ,
    SNAP_WARNING_MHZ,
    RFRules,
)
from .value_objects import RFPulse, TruthTable, TruthTableRow

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


def _drive_operator(b: MagneticField, jt: JahnTellerAxis, constants: PhysicalConstants, include_nuclear_drive: bool):
    basis = p1_dressed_basis(b, jt, constants)
    drive = np.array(basis.operators[0])
    if include_nuclear_drive:
        drive = drive + (constants.gamma_n / constants.gamma_e) * p1_nuclear_dressed_operators(basis)[0]
    return basis, drive


def period_propagator(
    energies: np.ndarray,
    drive: np.ndarray,
    pulse: RFPulse,
    steps_per_period: int = MIN_STEPS_PER_PERIOD,
) -> np.ndarray:
    """Propagator over one RF period from midpoint-sampled constant steps."""
    RFRules.validate_steps(steps_per_period)
    dt = pulse.period / steps_per_period
    h_static = np.diag(energies).astype(complex)
    propagator = np.eye(len(energies), dtype=complex)
    for k in range(steps_per_period):
        t_mid = (k + 0.5) * dt
        amplitude = pulse.amplitude_mhz * np.cos(TWO_PI * pulse.frequency * t_mid + pulse.phase)
        step = linalg.expm(-1j * TWO_PI * dt * (h_static + amplitude * drive))
        propagator = step @ propagator
    return propagator


def retention_traces(
    b: MagneticField,
    jt: JahnTellerAxis,
    pulse: RFPulse,
    constants: Optional[PhysicalConstants] = None,
    steps_per_period: int = MIN_STEPS_PER_PERIOD,
    include_nuclear_drive: bool = True,
    norm_tolerance: float = NORM_TOLERANCE,
    energies: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Retention |<i|psi_i(t)>|^2 of all six eigenstates, sampled once per RF period.

    Returns times (us, starting at 0) and an array of shape (6, n_samples)
    ordered like P1_LABELS. energies replaces the simulated levels (MHz,
    P1_LABELS order) while keeping the simulated drive matrix elements.

    Raises:
        IntegrationAccuracyError: If any state norm drifts beyond norm_tolerance
    """
    constants = constants or PhysicalConstants()
    basis, drive = _drive_operator(b, jt, constants, include_nuclear_drive)
    levels = basis.energies if energies is None else np.asarray(energies, dtype=float)
    step = period_propagator(levels, drive, pulse, steps_per_period)
    RFRules.validate_unitarity(step, norm_tolerance)

    n_periods = pulse.n_periods
    retention = np.empty((basis.dim, n_periods + 1))
    retention[:, 0] = 1.0
    state = np.eye(basis.dim, dtype=complex)
    for n in range(1, n_periods + 1):
        state = step @ state
        retention[:, n] = np.abs(np.diag(state)) ** 2
    RFRules.validate_unitarity(state, norm_tolerance)

    times = np.arange(n_periods + 1) * pulse.period
    return times, retention


def rabi_trace(
    b: MagneticField,
    jt: JahnTellerAxis,
    initial_label: str,
    pulse: RFPulse,
    samples: Optional[int] = None,
    constants: Optional[PhysicalConstants] = None,
    steps_per_period: int = MIN_STEPS_PER_PERIOD,
    include_nuclear_drive: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """Retention of one labeled eigenstate; optionally thinned to about `samples` points."""
    if initial_label not in P1_LABELS:
        raise ValueError(f"Unknown P1 state label: {initial_label}")
    times, retention = retention_traces(
        b, jt, pulse, constants, steps_per_period, include_nuclear_drive
    )
    trace = retention[P1_LABELS.index(initial_label)]
    if samples and samples < len(times):
        index = np.unique(np.linspace(0, len(times) - 1, samples).round().astype(int))
        return times[index], trace[index]
    return times, trace


def nearest_gap(b: MagneticField, jt: JahnTellerAxis, frequency: float, constants: Optional[PhysicalConstants] = None) -> float:
    """Simulated transition frequency closest to a listed one (MHz)."""
    gaps = transition_gaps(p1_dressed_basis(b, jt, constants or PhysicalConstants()))
    return float(gaps[np.argmin(np.abs(gaps - frequency))])


def listed_frequency_check(
    b: MagneticField,
    jt: JahnTellerAxis,
    frequencies: Sequence[float],
    constants: Optional[PhysicalConstants] = None,
) -> List[Dict[str, float]]:
    """Nearest simulated gap and its offset for every listed drive frequency."""
    rows = []
    for frequency in frequencies:
        gap = nearest_gap(b, jt, frequency, constants)
        rows.append({"listed_MHz": float(frequency), "nearest_gap_MHz": gap, "offset_MHz": gap - float(frequency)})
    return rows


def anchored_energies(
    energies: np.ndarray,
    lines: Sequence[float],
    tolerance: float = ANCHOR_TOLERANCE_MHZ,
) -> np.ndarray:
    """
    Levels moved by the smallest correction that puts listed lines on their transitions.

    Each line claims the simulated transition nearest to it when that lies
    within tolerance; a transition claimed twice keeps the closer line.
    Lines forming an inconsistent cycle are met in the least-squares sense.
    """
    energies = np.asarray(energies, dtype=float)
    i, j = np.triu_indices(len(energies), k=1)
    signed = energies[j] - energies[i]
    gaps = np.abs(signed)

    claims: Dict[int, Tuple[float, float]] = {}
    for line in lines:
        k = int(np.argmin(np.abs(gaps - line)))
        offset = abs(gaps[k] - line)
        if offset > tolerance:
            logger.debug(f"No transition within {tolerance} MHz of the listed line {line} MHz")
            continue
        if k not in claims or offset < claims[k][1]:
            claims[k] = (float(line), offset)
    if not claims:
        return energies.copy()

    constraints = np.zeros((len(claims), len(energies)))
    targets = np.zeros(len(claims))
    for row, (k, (line, _)) in enumerate(sorted(claims.items())):
        sign = 1.0 if signed[k] >= 0.0 else -1.0
        constraints[row, j[k]] = sign
        constraints[row, i[k]] = -sign
        targets[row] = line - gaps[k]
    correction = np.linalg.lstsq(constraints, targets, rcond=None)[0]
    misfit = float(np.max(np.abs(constraints @ correction - targets)))
    if misfit > ANCHOR_RESIDUAL_MHZ:
        logger.warning(f"Listed lines over-constrain the levels; largest misfit {misfit * 1e3:.1f} kHz")
    return energies + correction


def snapped_frequency(
    b: MagneticField,
    jt: JahnTellerAxis,
    frequency: float,
    constants: Optional[PhysicalConstants] = None,
    tolerance: float = SNAP_TOLERANCE_MHZ,
) -> float:
    """Listed frequency moved onto the nearest simulated gap when that gap is within tolerance."""
    gap = nearest_gap(b, jt, frequency, constants)
    offset = abs(gap - frequency)
    if offset > tolerance:
        logger.debug(f"JT {jt}: no gap within {tolerance} MHz of {frequency} MHz, driving as listed")
        return float(frequency)
    if offset > SNAP_WARNING_MHZ:
        logger.warning(f"JT {jt}: listed {frequency} MHz is {offset:.3f} MHz from the simulated gap {gap:.3f} MHz")
    return gap


def truth_table(
    b: MagneticField,
    jt: JahnTellerAxis,
    frequencies: Sequence[float],
    rabi_khz: float = 250.0,
    duration: Optional[float] = None,
    constants: Optional[PhysicalConstants] = None,
    snap: bool = True,
    snap_tolerance: float = SNAP_TOLERANCE_MHZ,
    threshold: float = RETENTION_THRESHOLD,
    steps_per_period: int = MIN_STEPS_PER_PERIOD,
    include_nuclear_drive: bool = True,
    anchor_lines: Optional[Sequence[float]] = None,
    anchor_window: float = ANCHOR_WINDOW_MHZ,
) -> TruthTable:
    """
    Simulated Rabi response table.

    A state's bit is 1 when its minimum retention over the pulse drops below
    threshold. Bits follow TRUTH_TABLE_COLUMNS.

    With anchor_lines every frequency is driven as given, and the listed
    lines within anchor_window of it are first anchored onto their simulated
    transitions, so neighbouring lines keep their listed spacing. Otherwise
    a frequency is snapped onto the nearest simulated gap when snap is set.
    """
    constants = constants or PhysicalConstants()
    levels = p1_dressed_basis(b, jt, constants).energies
    rows = []
    for frequency in frequencies:
        energies = None
        if anchor_lines is not None:
            drive = float(frequency)
            nearby = [line for line in anchor_lines if abs(line - drive) <= anchor_window]
            energies = anchored_energies(levels, nearby)
        elif snap:
            drive = snapped_frequency(b, jt, frequency, constants, snap_tolerance)
        else:
            drive = float(frequency)
        pulse = RFPulse(frequency=drive, rabi_khz=rabi_khz, duration=duration)
        _, retention = retention_traces(
            b, jt, pulse, constants, steps_per_period, include_nuclear_drive, energies=energies
        )
        minimum = retention.min(axis=1)
        bits = tuple(int(minimum[P1_LABELS.index(label)] < threshold) for label in TRUTH_TABLE_COLUMNS)
        rows.append(TruthTableRow(listed_mhz=float(frequency), bits=bits, drive_mhz=drive))
        logger.debug(f"JT {jt} at {drive:.3f} MHz: {''.join(map(str, bits))}")
    return TruthTable(jt=jt, rows=tuple(rows))
