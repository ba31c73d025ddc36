"""Resolved inputs of one toolkit run."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import ValidationError

from app.config.settings import RunConfig, Settings
from app.domain.spins.value_objects import (
    DefectGeometry,
    MagneticField,
    PhysicalConstants,
    SphericalVector,
    electron_dipolar_prefactor,
)
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunContext:
    """Field, geometry, constants and seeding shared by every subcommand."""
    b: MagneticField
    geometry: DefectGeometry
    constants: PhysicalConstants
    seed: int
    threads: int
    jt: str = "A"
    jt2: Optional[str] = None
    m_I: int = 0
    out: Optional[str] = None
    trace_file: Optional[str] = None
    observations_file: Optional[str] = None

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Independent generator per named stream of the master seed."""
        return np.random.default_rng(np.random.SeedSequence([self.seed, stream]))

    @classmethod
    def resolve(cls, settings: Settings, config: Optional[RunConfig] = None, **overrides) -> "RunContext":
        """
        Merge settings, an optional run configuration and command-line overrides,
        later sources winning.

        Raises:
            ConfigurationError: If the merged values do not form valid inputs
        """
        config = config or RunConfig()
        values = {k: v for k, v in overrides.items() if v is not None}

        def pick(name, config_value, default):
            if name in values:
                return values[name]
            return config_value if config_value is not None else default

        try:
            gamma_e = pick("gamma_e", config.gamma_e, settings.GAMMA_E)
            constants = PhysicalConstants(
                gamma_e=gamma_e,
                gamma_n=pick("gamma_n", config.gamma_n, settings.GAMMA_N),
                gamma_c=pick("gamma_c", config.gamma_c, settings.GAMMA_C),
                zfs_delta=pick("zfs_delta", config.zfs_delta, settings.ZFS_DELTA),
                dipolar_prefactor=pick(
                    "dipolar_prefactor", config.dipolar_prefactor, electron_dipolar_prefactor(gamma_e)
                ),
                A_diag=tuple(pick("A_diag", config.A_diag, settings.A_DIAG)),
                P_diag=tuple(pick("P_diag", config.P_diag, settings.P_DIAG)),
            )
            b = MagneticField.from_sequence(pick("field", config.field, settings.FIELD_GAUSS))
            geometry = DefectGeometry(
                r12=SphericalVector(*pick("r12", config.r12, settings.R12_SPHERICAL)),
                r23=SphericalVector(*pick("r23", config.r23, settings.R23_SPHERICAL)),
            )
        except (ValueError, TypeError, ValidationError) as exc:
            raise ConfigurationError(f"Invalid run configuration: {exc}", details={"reason": str(exc)})

        threads = int(pick("threads", config.threads, settings.DEFAULT_THREADS))
        if threads < 1:
            raise ConfigurationError(f"Thread count must be positive, got {threads}", details={"threads": threads})

        context = cls(
            b=b,
            geometry=geometry,
            constants=constants,
            seed=int(pick("seed", config.seed, settings.DEFAULT_SEED)),
            threads=threads,
            jt=pick("jt", config.jt, "A"),
            jt2=pick("jt2", config.jt2, None),
            m_I=int(pick("m_I", config.m_I, 0)),
            out=pick("out", config.out, None),
            trace_file=pick("trace_file", config.trace_file, None),
            observations_file=pick("observations_file", config.observations_file, None),
        )
        logger.debug(f"Run context: B = {b.vector.tolist()} G, seed {context.seed}, {context.threads} thread(s)")
        return context
