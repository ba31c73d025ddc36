"""Unified toolkit settings and run configuration."""

import json
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


# ENUMS

class Subsystem(str, Enum):
    """Composite Hilbert spaces that can be assembled."""
    P1_P1 = "P1-P1"
    NV_P1 = "NV-P1"
    NV_P1_P1 = "NV-P1-P1"


class NoiseCorrelation(str, Enum):
    """How field draws are shared between the two P1 sites."""
    CORRELATED = "correlated"
    UNCORRELATED = "uncorrelated"
    SITE_LOCAL = "site-local"


# MAIN SETTINGS CLASS

class Settings(BaseSettings):
    """
    Toolkit defaults loaded from environment variables.

    Covers:
    - Physical constants
    - Working field and geometry
    - Numerical knobs of each simulation area
    - CLI defaults
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )

    # APPLICATION SETTINGS

    PROJECT_NAME: str = "nvpair"
    DEBUG: bool = False
    DEFAULT_SEED: int = 20240611
    DEFAULT_THREADS: int = Field(default=1, ge=1, le=256)

    # PHYSICAL CONSTANTS

    GAMMA_E: float = 2.8024          # MHz/G
    GAMMA_N: float = 3.078e-4        # MHz/G
    GAMMA_C: float = 1.0705e-3       # MHz/G
    ZFS_DELTA: float = 2870.0        # MHz
    A_DIAG: List[float] = [114.03, 81.31, 81.31]
    P_DIAG: List[float] = [2.65, 1.32, 1.32]

    # WORKING POINT

    FIELD_GAUSS: List[float] = [2.43, 1.42, 45.552]
    R12_SPHERICAL: List[float] = [11.2, 1.1, 2.3]
    R23_SPHERICAL: List[float] = [7.4, 1.9, 0.8]

    # SPECTROSCOPY

    LABEL_TIE_TOLERANCE: float = Field(default=1e-6, gt=0.0)
    FLIP_FLOP_MIN_OVERLAP: float = Field(default=0.75, gt=0.5, le=1.0)
    RESONANCE_RTOL: float = Field(default=0.01, gt=0.0, lt=1.0)

    # DYNAMICAL DECOUPLING

    DD_UNITS: int = Field(default=10, ge=1)
    DD_REPETITIONS: int = Field(default=200, ge=1)
    P_CLICK_MS0: float = Field(default=0.70, ge=0.0, le=1.0)
    P_NOCLICK_MS1: float = Field(default=0.99, ge=0.0, le=1.0)
    TRACE_BIN_SIZE: int = Field(default=200, ge=1)
    TRACE_SCRAMBLE_PROBABILITY: float = Field(default=5e-4, ge=0.0, le=1.0)
    HIGH_BIN_FRACTION: float = Field(default=0.013, ge=0.0, le=1.0)

    # RF SIMULATION

    RF_RABI_KHZ: float = Field(default=250.0, gt=0.0)
    RF_STEPS_PER_PERIOD: int = Field(default=40, ge=40)
    RF_RETENTION_THRESHOLD: float = Field(default=0.95, gt=0.0, lt=1.0)
    RF_SNAP_TOLERANCE_MHZ: float = Field(default=0.5, ge=0.0)
    RF_NORM_TOLERANCE: float = Field(default=1e-6, gt=0.0)

    # IMAGING

    FIT_STARTS_P1: int = Field(default=300, ge=1)
    FIT_STARTS_NV: int = Field(default=400, ge=1)
    FIT_R_MIN_NM: float = Field(default=1.0, gt=0.0)
    FIT_R_MAX_NM: float = Field(default=30.0, gt=0.0)
    BENCH_R_MIN_NM: float = Field(default=2.0, gt=0.0)
    BENCH_R_MAX_NM: float = Field(default=15.0, gt=0.0)
    BENCH_NOISE_STD: float = Field(default=0.002, ge=0.0)

    # NOISE

    CARBON_CONCENTRATION: float = Field(default=1e-4, gt=0.0, lt=1.0)
    CARBON_RADIUS_NM: float = Field(default=15.0, gt=0.0)
    CARBON_CUTOFF_KHZ: float = Field(default=10.0, gt=0.0)
    DIAMOND_LATTICE_NM: float = 0.35668

    # PROTOCOL

    INIT_READOUTS: int = Field(default=50, ge=1)
    INIT_FINAL_THRESHOLD: int = Field(default=15, ge=0)
    INIT_THETA_SET: List[int] = [3, 5, 7, 9]
    INIT_LAMBDA_MAX: int = Field(default=8, ge=0)
    INIT_SUCCESSES: int = Field(default=200, ge=1)
    INIT_SECOND_CHECK: List[int] = [10, 3]
    MEASUREMENT_TIME_US: float = Field(default=1000.0, gt=0.0)
    SCRAMBLE_OVERHEAD_MEASUREMENTS: int = Field(default=0, ge=0)
    READOUT_P_A: float = Field(default=0.5, ge=0.0, le=1.0)
    READOUT_P_B: float = Field(default=0.04, ge=0.0, le=1.0)
    READOUT_PRIOR_A: float = Field(default=0.5, ge=0.0, le=1.0)
    READOUT_CONTRAST_DECAY: float = Field(default=1.0, gt=0.0, le=1.0)
    READOUT_HERALD_K: int = Field(default=10, ge=0)
    READOUT_HERALD_N_A: int = Field(default=8, ge=0)
    READOUT_HERALD_N_B: int = Field(default=1, ge=0)
    READOUT_N_MAX: int = Field(default=10, ge=1)

    # COMPUTED PROPERTIES

    @computed_field
    @property
    def gamma_ratio(self) -> float:
        """Electron over nitrogen gyromagnetic ratio."""
        return self.GAMMA_E / self.GAMMA_N

    # VALIDATORS

    @field_validator("A_DIAG", "P_DIAG")
    @classmethod
    def validate_axial_tensor(cls, v: List[float]) -> List[float]:
        """Principal values must be axial with positions 2 and 3 degenerate."""
        if len(v) != 3:
            raise ValueError(f"Tensor needs three principal values, got {len(v)}")
        if v[1] != v[2]:
            raise ValueError(f"Tensor is not axial: {v}")
        return v

    @field_validator("FIELD_GAUSS", "R12_SPHERICAL", "R23_SPHERICAL")
    @classmethod
    def validate_triple(cls, v: List[float]) -> List[float]:
        """Vectors are given as three components."""
        if len(v) != 3:
            raise ValueError(f"Expected three components, got {len(v)}")
        return v


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()


# RUN CONFIGURATION (the --config file)

class RunConfig(BaseModel):
    """
    Flat JSON run configuration.

    Any field left out falls back to the environment-backed settings.
    Unknown keys are rejected.
    """

    model_config = ConfigDict(extra="forbid")

    gamma_e: Optional[float] = None
    gamma_n: Optional[float] = None
    gamma_c: Optional[float] = None
    zfs_delta: Optional[float] = None
    dipolar_prefactor: Optional[float] = None
    A_diag: Optional[List[float]] = None
    P_diag: Optional[List[float]] = None

    field: Optional[List[float]] = None
    r12: Optional[List[float]] = None
    r23: Optional[List[float]] = None

    jt: Optional[str] = None
    jt2: Optional[str] = None
    m_I: Optional[int] = None

    seed: Optional[int] = None
    threads: Optional[int] = Field(default=None, ge=1)
    out: Optional[str] = None
    trace_file: Optional[str] = None
    observations_file: Optional[str] = None

    @field_validator("field", "r12", "r23")
    @classmethod
    def validate_vector(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        """Vectors are given as three components."""
        if v is not None and len(v) != 3:
            raise ValueError(f"Expected three components, got {len(v)}")
        return v

    @field_validator("jt", "jt2")
    @classmethod
    def validate_jt(cls, v: Optional[str]) -> Optional[str]:
        """Jahn-Teller selectors are single axis letters."""
        if v is None:
            return v
        v = v.strip().upper()
        if v not in {"A", "B", "C", "D"}:
            raise ValueError(f"Invalid Jahn-Teller axis: {v}. Must be one of A, B, C, D")
        return v

    @field_validator("m_I")
    @classmethod
    def validate_m_i(cls, v: Optional[int]) -> Optional[int]:
        """Nitrogen projection of a spin-1 nucleus."""
        if v is not None and v not in (-1, 0, 1):
            raise ValueError(f"Invalid nitrogen projection: {v}")
        return v

    @field_validator("trace_file", "observations_file")
    @classmethod
    def validate_file_exists(cls, v: Optional[str]) -> Optional[str]:
        """Referenced input files must exist."""
        if v is not None and not Path(v).is_file():
            raise ValueError(f"Referenced file does not exist: {v}")
        return v

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        """Parse a flat JSON configuration file."""
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise ValueError("Configuration file must hold a flat JSON object")
        return cls(**data)
