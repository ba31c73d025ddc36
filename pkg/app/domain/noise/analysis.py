"""
Noise propagation and pseudo-spin dephasing.

Frequencies are in kHz and times in ms unless a function says otherwise;
sigma_from_t2 and t2_from_sigma work in any reciprocal pair of units.
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.optimize import curve_fit

from app.config.constants import (
    CARBON_NUCLEAR_T2STAR_S,
    MEASURED_ELECTRON_T2STAR_US,
    PAIR_T2STAR_MS,
)
from app.config.settings import NoiseCorrelation
from app.domain.spectro.couplings import MHZ_TO_KHZ, CouplingCalculator, pair_subspace_splitting
from app.domain.spectro.exceptions import NoFlipFlopError
from app.domain.spins.value_objects import MagneticField, PhysicalConstants
from .rules import CLOCK_REGIME_MAX_RATIO, DEPHASING_LEVEL, NUCLEAR_SPIN_VARIANCE, NoiseRules
from .value_objects import CouplingDistribution, DephasingCurve, FieldNoiseSpec

logger = logging.getLogger(__name__)

MapFn = Callable[[Callable, Iterable], Iterable]

SQRT2_PI = math.sqrt(2.0) * math.pi


# Dephasing arithmetic

def sigma_from_t2(t2star: float) -> float:
    """Quasi-static Gaussian frequency spread 1/(sqrt(2) pi T2*)."""
    NoiseRules.validate_positive("t2star", t2star)
    return 1.0 / (SQRT2_PI * t2star)


def t2_from_sigma(sigma: float) -> float:
    """Dephasing time 1/(sqrt(2) pi sigma)."""
    NoiseRules.validate_positive("sigma", sigma)
    return 1.0 / (SQRT2_PI * sigma)


def quadrature_decompose(total_sigma: float, component_sigma: float) -> float:
    """Remainder sqrt(total^2 - component^2) of independent noise sources."""
    NoiseRules.validate_quadrature(total_sigma, component_sigma)
    return math.sqrt(total_sigma ** 2 - component_sigma ** 2)


# 13C bath

@lru_cache(maxsize=4)
def _carbon_site_couplings(radius_nm: float, lattice_nm: float, coupling_khz_nm3: float) -> np.ndarray:
    """
    Secular hyperfine couplings (kHz) of every diamond lattice site within
    radius_nm of a central electron, quantized along [111].
    """
    basis = np.array([
        [0.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0],
        [0.25, 0.25, 0.25], [0.25, 0.75, 0.75], [0.75, 0.25, 0.75], [0.75, 0.75, 0.25],
    ])
    n = int(math.ceil(radius_nm / lattice_nm)) + 1
    cells = np.arange(-n, n + 1)
    grid = np.stack(np.meshgrid(cells, cells, cells, indexing="ij"), axis=-1).reshape(-1, 3).astype(float)
    axis = np.ones(3) / math.sqrt(3.0)
    couplings = []
    for offset in basis:
        sites = (grid + offset) * lattice_nm
        r = np.linalg.norm(sites, axis=1)
        keep = (r > 1e-9) & (r <= radius_nm)
        cos_theta = sites[keep] @ axis / r[keep]
        couplings.append(coupling_khz_nm3 * (3.0 * cos_theta ** 2 - 1.0) / r[keep] ** 3)
    return np.concatenate(couplings)


def carbon_bath_sample(
    rng: np.random.Generator,
    concentration: float = 1e-4,
    n_configs: int = 10_000,
    coupling_cutoff_khz: float = 10.0,
    radius_nm: float = 15.0,
    lattice_nm: float = 0.35668,
    constants: Optional[PhysicalConstants] = None,
) -> np.ndarray:
    """
    Quasi-static 13C field spread b (kHz) seen by an electron, one value per
    random bath configuration.

    Sites are occupied independently with the given probability; spins
    coupled more strongly than the cutoff are left out.
    b = sqrt(sum_i A_i^2 / 4).
    """
    NoiseRules.validate_concentration(concentration)
    constants = constants or PhysicalConstants()
    coupling = constants.dipolar_prefactor * constants.gamma_c / constants.gamma_e * MHZ_TO_KHZ
    couplings = _carbon_site_couplings(float(radius_nm), float(lattice_nm), float(coupling))
    couplings = couplings[np.abs(couplings) <= coupling_cutoff_khz]
    squared = couplings ** 2

    n_sites = squared.size
    occupied = rng.binomial(n_sites, concentration, size=n_configs)
    b = np.empty(n_configs)
    for k, count in enumerate(occupied):
        chosen = np.unique(rng.integers(0, n_sites, size=count))
        b[k] = math.sqrt(NUCLEAR_SPIN_VARIANCE * squared[chosen].sum())
    logger.info(
        f"13C bath: {n_configs} configurations, {n_sites} sites, "
        f"mean b {b.mean():.3f} kHz, median {np.median(b):.3f} kHz"
    )
    return b


# Field noise to coupling

def _field_draws(noise: FieldNoiseSpec, rng: np.random.Generator, n_samples: int) -> Tuple[np.ndarray, np.ndarray]:
    sigma = noise.sigma
    if noise.correlation is NoiseCorrelation.CORRELATED:
        shared = rng.standard_normal((n_samples, 3)) * sigma
        return shared, shared
    if noise.correlation is NoiseCorrelation.UNCORRELATED:
        return rng.standard_normal((n_samples, 3)) * sigma, rng.standard_normal((n_samples, 3)) * sigma
    local = np.zeros((n_samples, 3))
    for axis in noise.local_axes:
        local[:, axis] = rng.standard_normal(n_samples) * sigma[axis]
    return np.zeros((n_samples, 3)), local


def _couplings_at(
    b: MagneticField,
    r23,
    jt: str,
    pair: Tuple[str, str],
    constants: PhysicalConstants,
    site_fields: Tuple[MagneticField, MagneticField],
) -> Tuple[float, float]:
    calc = CouplingCalculator(b, constants, site_fields=site_fields)
    p1, p2 = calc.p1_basis(jt, 0), calc.p1_basis(jt, 1)
    h = calc.pair_hamiltonian(r23, jt)
    index_ab = p1.index(pair[0]) * p2.dim + p2.index(pair[1])
    index_ba = p1.index(pair[1]) * p2.dim + p2.index(pair[0])
    frequency = pair_subspace_splitting(h, index_ab, index_ba, min_overlap=0.5)
    try:
        x = abs(calc.flip_flop(r23, jt, pair[0], pair[1]))
    except NoFlipFlopError:
        x = float("nan")
    return x, frequency


def coupling_distribution(
    b: MagneticField,
    r23,
    jt: str,
    pair: Tuple[str, str],
    noise: FieldNoiseSpec,
    rng: np.random.Generator,
    n_samples: int = 1000,
    constants: Optional[PhysicalConstants] = None,
    map_fn: MapFn = map,
) -> CouplingDistribution:
    """
    Monte-Carlo distribution of X and of the pair splitting under field noise.

    Correlated noise shifts both P1 fields by the same draw. Uncorrelated
    noise draws each site independently; site-local noise moves only the
    second P1 along the configured axes. X is NaN for draws where the
    detuned pair no longer forms a flip-flop.
    """
    constants = constants or PhysicalConstants()
    r23 = np.asarray(r23, dtype=float)
    nominal_x, nominal_frequency = _couplings_at(b, r23, jt, pair, constants, (b, b))

    if noise.is_silent:
        x = np.full(n_samples, nominal_x)
        f = np.full(n_samples, nominal_frequency)
        return CouplingDistribution(x, f, nominal_x, nominal_frequency, noise.correlation)

    first, second = _field_draws(noise, rng, n_samples)

    def evaluate(draw):
        d1, d2 = draw
        return _couplings_at(b, r23, jt, pair, constants, (b.shifted(d1), b.shifted(d2)))

    results = np.array(list(map_fn(evaluate, list(zip(first, second)))))
    distribution = CouplingDistribution(
        x_samples=results[:, 0],
        frequency_samples=results[:, 1],
        nominal_x=nominal_x,
        nominal_frequency=nominal_frequency,
        correlation=noise.correlation,
    )
    undefined = int(np.sum(~np.isfinite(distribution.x_samples)))
    if undefined:
        logger.warning(f"{undefined} of {n_samples} noisy draws broke the flip-flop pairing")
    logger.info(
        f"Coupling distribution ({noise.correlation.value}): X {nominal_x:.4f} kHz, "
        f"sigma {distribution.x_std * 1000:.2f} Hz ({distribution.relative_x_std:.3%})"
    )
    return distribution


# Pseudo-spin dephasing

def clock_sensitivity(x_khz: float, delta_z_values: Sequence[float]) -> List[Dict[str, float]]:
    """
    Exact shift f(dZ) - f(0) of the m_s = 0 pseudo-spin next to dZ^2/(2X).

    f is the eigenvalue gap of X Sx + dZ Sz.
    """
    NoiseRules.validate_positive("X", abs(x_khz))
    rows = []
    for dz in delta_z_values:
        h = 0.5 * np.array([[dz, x_khz], [x_khz, -dz]])
        low, high = linalg.eigvalsh(h)
        shift = float(high - low) - abs(x_khz)
        quadratic = dz ** 2 / (2.0 * abs(x_khz))
        if abs(dz) > CLOCK_REGIME_MAX_RATIO * abs(x_khz):
            logger.debug(f"dZ/X = {abs(dz / x_khz):.3f} lies outside the quadratic regime")
        rows.append({
            "delta_Z_kHz": float(dz),
            "shift_kHz": shift,
            "quadratic_kHz": quadratic,
            "ratio": shift / quadratic if quadratic else 1.0,
        })
    return rows


def _rotate(vector: np.ndarray, axes: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Rodrigues rotation of one vector about many axes; returns (samples, times, 3)."""
    cos = np.cos(angles)[..., None]
    sin = np.sin(angles)[..., None]
    axes = axes[:, None, :]
    cross = np.cross(axes, vector)
    dot = (axes @ vector)[..., None]
    return vector * cos + cross * sin + axes * dot * (1.0 - cos)


def _gaussian(t, t2):
    return np.exp(-(t / t2) ** 2)


def _first_crossing(times: np.ndarray, values: np.ndarray, level: float) -> Optional[float]:
    below = np.nonzero(values < level)[0]
    if below.size == 0:
        return None
    k = int(below[0])
    if k == 0:
        return float(times[0])
    t0, t1 = times[k - 1], times[k]
    v0, v1 = values[k - 1], values[k]
    return float(t0 + (v0 - level) * (t1 - t0) / (v0 - v1))


def dephasing_curve(
    x_khz: float,
    delta_z_sigma_khz: float,
    times_ms: Sequence[float],
    rng: np.random.Generator,
    m_s: int = 0,
    z_khz: float = 0.0,
    n_samples: int = 4000,
) -> DephasingCurve:
    """
    Bloch-vector length of the pseudo-spin averaged over quasi-static
    Gaussian detuning draws.

    H = X Sx + (m_s Z + dZ) Sz with the Bloch vector starting along y.
    T2* is the first 1/e crossing of the averaged length; a Gaussian
    envelope fit is reported next to it.
    """
    if m_s not in (1, 0, -1):
        raise ValueError(f"Invalid NV projection: {m_s}")
    if delta_z_sigma_khz < 0:
        raise ValueError("Detuning spread cannot be negative")
    times = np.asarray(times_ms, dtype=float)

    dz = rng.standard_normal(n_samples) * delta_z_sigma_khz + m_s * z_khz
    field = np.column_stack([np.full(n_samples, float(x_khz)), np.zeros(n_samples), dz])
    frequency = np.linalg.norm(field, axis=1)
    axes = np.divide(field, frequency[:, None], out=np.tile([0.0, 0.0, 1.0], (n_samples, 1)), where=frequency[:, None] > 0)
    angles = 2.0 * np.pi * frequency[:, None] * times[None, :]

    start = np.array([0.0, 1.0, 0.0])
    mean_vector = _rotate(start, axes, angles).mean(axis=0)
    length = np.linalg.norm(mean_vector, axis=1)

    t2star = _first_crossing(times, length, DEPHASING_LEVEL)
    gaussian_t2star, residual = None, None
    if t2star is not None and times.size >= 3:
        try:
            popt, _ = curve_fit(_gaussian, times, length, p0=[t2star], maxfev=2000)
            gaussian_t2star = abs(float(popt[0]))
            residual = float(np.sqrt(np.mean((_gaussian(times, gaussian_t2star) - length) ** 2)))
        except RuntimeError as exc:
            logger.warning(f"Gaussian envelope fit failed: {exc}")
    elif delta_z_sigma_khz > 0:
        logger.info(f"Bloch length stays above 1/e up to {times[-1] if times.size else 0:.3f} ms")

    return DephasingCurve(
        times=times,
        bloch_length=length,
        t2star=t2star,
        gaussian_t2star=gaussian_t2star,
        fit_residual=residual,
    )


def field_to_detuning_khz(field_gauss: float, constants: Optional[PhysicalConstants] = None) -> float:
    """Electron Zeeman shift (kHz) of a single-site field offset."""
    constants = constants or PhysicalConstants()
    return constants.gamma_e * field_gauss * MHZ_TO_KHZ


def noise_budget(
    constants: Optional[PhysicalConstants] = None,
    field_noise_hz: Optional[Mapping[str, float]] = None,
) -> List[Dict[str, float]]:
    """
    Table of dephasing sources with sigma (Hz) and T2* (ms).

    The 13C row converts the nuclear dephasing time to the electron by the
    gyromagnetic ratio; the P1-bath share is the quadrature remainder of the
    measured electron value. field_noise_hz adds flip-flop spreads per
    field-noise regime.
    """
    constants = constants or PhysicalConstants()
    electron_hz = sigma_from_t2(MEASURED_ELECTRON_T2STAR_US * 1e-6)
    nuclear_hz = sigma_from_t2(CARBON_NUCLEAR_T2STAR_S)
    carbon_hz = nuclear_hz * constants.gamma_e / constants.gamma_c
    p1_bath_hz = quadrature_decompose(electron_hz, carbon_hz)
    pair_hz = sigma_from_t2(PAIR_T2STAR_MS * 1e-3)

    rows = [
        ("electron (measured)", electron_hz),
        ("13C nuclear", nuclear_hz),
        ("13C bath (electron equivalent)", carbon_hz),
        ("P1 bath (quadrature remainder)", p1_bath_hz),
        ("P1 pair (measured)", pair_hz),
    ]
    rows.extend((f"field noise ({name})", float(sigma)) for name, sigma in (field_noise_hz or {}).items())
    return [
        {"source": name, "sigma_Hz": sigma, "t2star_ms": t2_from_sigma(sigma) * 1e3 if sigma > 0 else float("inf")}
        for name, sigma in rows
    ]
