"""Spin model value objects - immutable physical inputs."""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import constants as codata

from app.domain.common.value_object import ValueObject
from .exceptions import MissingGeometryError
from .rules import SpinRules


def electron_dipolar_prefactor(gamma_e: float = 2.8024) -> float:
    """
    Electron-electron dipolar constant mu0 * gamma_e^2 * hbar / (4 pi) in MHz nm^3.

    gamma_e is given in MHz/G and converted to rad/(s T).
    """
    gamma_rad = 2.0 * math.pi * gamma_e * 1e6 * 1e4
    coupling_hz = codata.mu_0 / (4.0 * math.pi) * gamma_rad ** 2 * codata.hbar / (2.0 * math.pi)
    return coupling_hz / 1e-27 / 1e6


@dataclass(frozen=True)
class PhysicalConstants(ValueObject):
    """Physical constants of the NV-P1-P1 system (MHz, G, nm)."""
    gamma_e: float = 2.8024
    gamma_n: float = 3.078e-4
    gamma_c: float = 1.0705e-3
    zfs_delta: float = 2870.0
    dipolar_prefactor: float = field(default_factory=electron_dipolar_prefactor)
    A_diag: Tuple[float, float, float] = (114.03, 81.31, 81.31)
    P_diag: Tuple[float, float, float] = (2.65, 1.32, 1.32)

    def __post_init__(self):
        if self.gamma_e <= 0 or self.gamma_n <= 0 or self.gamma_c <= 0:
            raise ValueError("Gyromagnetic ratios must be positive")
        if self.dipolar_prefactor < 0:
            raise ValueError("Dipolar prefactor cannot be negative")
        for name in ("A_diag", "P_diag"):
            values = tuple(float(v) for v in getattr(self, name))
            if len(values) != 3:
                raise ValueError(f"{name} needs three principal values")
            if values[1] != values[2]:
                raise ValueError(f"{name} must be axial with equal second and third values")
            self._set(name, values)

    @property
    def hyperfine_principal(self) -> Tuple[float, float, float]:
        """Hyperfine principal values with the unique value along the local z axis."""
        unique, perp, _ = self.A_diag
        return (perp, perp, unique)

    @property
    def quadrupole_principal(self) -> Tuple[float, float, float]:
        """Traceless axial quadrupole tensor with the unique value along local z."""
        unique, perp, _ = self.P_diag
        return (perp, perp, -unique)

    def with_prefactor(self, prefactor: float) -> "PhysicalConstants":
        """Copy with a different dipolar prefactor."""
        return PhysicalConstants(
            gamma_e=self.gamma_e,
            gamma_n=self.gamma_n,
            gamma_c=self.gamma_c,
            zfs_delta=self.zfs_delta,
            dipolar_prefactor=prefactor,
            A_diag=self.A_diag,
            P_diag=self.P_diag,
        )

    def to_dict(self) -> dict:
        """Convert to a flat dictionary for output."""
        return {
            "gamma_e_MHz_per_G": self.gamma_e,
            "gamma_n_MHz_per_G": self.gamma_n,
            "gamma_c_MHz_per_G": self.gamma_c,
            "zfs_delta_MHz": self.zfs_delta,
            "dipolar_prefactor_MHz_nm3": self.dipolar_prefactor,
            "A_diag_MHz": list(self.A_diag),
            "P_diag_MHz": list(self.P_diag),
        }


@dataclass(frozen=True)
class MagneticField(ValueObject):
    """Static magnetic field in Gauss, NV frame."""
    bx: float
    by: float
    bz: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.bx, self.by, self.bz)):
            raise ValueError(f"Field components must be finite: {(self.bx, self.by, self.bz)}")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz], dtype=float)

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.vector))

    def shifted(self, delta) -> "MagneticField":
        """Field plus a perturbation vector."""
        return MagneticField(self.bx + float(delta[0]), self.by + float(delta[1]), self.bz + float(delta[2]))

    @classmethod
    def from_sequence(cls, values) -> "MagneticField":
        bx, by, bz = (float(v) for v in values)
        return cls(bx, by, bz)


JT_PRIMARY_ANGLES = {
    "A": (0.0, 109.5),
    "B": (120.0, 109.5),
    "C": (240.0, 109.5),
    "D": (0.0, 0.0),
}


@dataclass(frozen=True)
class JahnTellerAxis(ValueObject):
    """Jahn-Teller axis of a P1 center with its orientation variant."""
    axis: str
    orientation: str = "primary"

    def __post_init__(self):
        axis = self.axis.strip().upper()
        if axis not in JT_PRIMARY_ANGLES:
            raise ValueError(f"Invalid Jahn-Teller axis: {self.axis}")
        if self.orientation not in ("primary", "mirror"):
            raise ValueError(f"Invalid orientation: {self.orientation}")
        self._set("axis", axis)

    @property
    def alpha(self) -> float:
        """First Euler angle in degrees."""
        alpha, _ = JT_PRIMARY_ANGLES[self.axis]
        if self.orientation == "mirror":
            return (alpha + 180.0) % 360.0
        return alpha

    @property
    def beta(self) -> float:
        """Second Euler angle in degrees."""
        _, beta = JT_PRIMARY_ANGLES[self.axis]
        if self.orientation == "mirror":
            return 180.0 - beta
        return beta

    @property
    def direction(self) -> np.ndarray:
        """Unit symmetry axis in the NV frame."""
        a = math.radians(self.alpha)
        b = math.radians(self.beta)
        return np.array([math.sin(b) * math.cos(a), math.sin(b) * math.sin(a), math.cos(b)])

    def mirrored(self) -> "JahnTellerAxis":
        other = "mirror" if self.orientation == "primary" else "primary"
        return JahnTellerAxis(self.axis, other)

    def __str__(self) -> str:
        return self.axis if self.orientation == "primary" else f"{self.axis}'"


@dataclass(frozen=True)
class SphericalVector(ValueObject):
    """Vector given as (r nm, theta rad, phi rad)."""
    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"Radius must be positive, got {self.r}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"Polar angle must lie in [0, pi], got {self.theta}")
        self._set("phi", float(self.phi) % (2.0 * math.pi))

    @property
    def cartesian(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([
            self.r * st * math.cos(self.phi),
            self.r * st * math.sin(self.phi),
            self.r * math.cos(self.theta),
        ])

    @classmethod
    def from_cartesian(cls, vec) -> "SphericalVector":
        x, y, z = (float(v) for v in vec)
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0.0:
            raise ValueError("Cannot express the zero vector in spherical coordinates")
        theta = math.acos(max(-1.0, min(1.0, z / r)))
        return cls(r, theta, math.atan2(y, x))

    def to_list(self) -> list:
        return [self.r, self.theta, self.phi]


@dataclass(frozen=True)
class DefectGeometry(ValueObject):
    """NV to P1 one vector and P1 one to P1 two vector."""
    r12: Optional[SphericalVector] = None
    r23: Optional[SphericalVector] = None

    def require_r12(self) -> np.ndarray:
        if self.r12 is None:
            raise MissingGeometryError("Geometry needs the NV to P1 vector r12", details={"missing": "r12"})
        return self.r12.cartesian

    def require_r23(self) -> np.ndarray:
        if self.r23 is None:
            raise MissingGeometryError("Geometry needs the P1 to P1 vector r23", details={"missing": "r23"})
        return self.r23.cartesian

    def require_r13(self) -> np.ndarray:
        """NV to P1 two vector."""
        return self.require_r12() + self.require_r23()

    def swapped(self) -> "DefectGeometry":
        """Same positions with the two P1 labels exchanged."""
        r13 = self.require_r13()
        return DefectGeometry(
            r12=SphericalVector.from_cartesian(r13),
            r23=SphericalVector.from_cartesian(-self.require_r23()),
        )


@dataclass(frozen=True, eq=False)
class HermitianOperator(ValueObject):
    """Dense Hermitian matrix in MHz with read-only storage."""
    matrix: np.ndarray

    def __post_init__(self):
        data = np.array(self.matrix, dtype=complex)
        SpinRules.validate_hermitian(data)
        data.setflags(write=False)
        self._set("matrix", data)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix + other.matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix - other.matrix)

    def scaled(self, factor: float) -> "HermitianOperator":
        return HermitianOperator(self.matrix * float(factor))
