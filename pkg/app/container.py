"""Dependency injection container - composition root."""

from functools import lru_cache
from typing import Optional

from app.application.common.context import RunContext
from app.application.dynamics.service import DynamicsService
from app.application.imaging.service import ImagingService
from app.application.noise.service import NoiseService
from app.application.protocol.service import ProtocolService
from app.application.rf.service import RFService
from app.application.spectro.service import SpectroService
from app.config.settings import RunConfig, Settings, get_settings
from app.domain.dynamics.value_objects import PhotonModel, TimeTraceModel
from app.domain.protocol.value_objects import ReadoutModel
from app.infrastructure.optimization.scipy_solver import ScipyLeastSquaresSolver
from app.infrastructure.storage.result_writer import ResultWriter
from app.infrastructure.tasks.worker_pool import WorkerPool


class Container:
    """
    Dependency injection container - composition root.

    This is the ONLY place where concrete implementations are instantiated.
    Services receive the resolved run context and their collaborators.
    """

    def __init__(self, settings: Optional[Settings] = None, context: Optional[RunContext] = None):
        self.settings = settings or get_settings()
        self._context = context
        self._pool: Optional[WorkerPool] = None
        self._solver: Optional[ScipyLeastSquaresSolver] = None

    # Run context

    def configure(self, config: Optional[RunConfig] = None, **overrides) -> RunContext:
        """Resolve the run context from settings, a config file and CLI overrides."""
        self._context = RunContext.resolve(self.settings, config, **overrides)
        self._pool = None
        return self._context

    @property
    def context(self) -> RunContext:
        if self._context is None:
            self._context = RunContext.resolve(self.settings)
        return self._context

    # Infrastructure

    def worker_pool(self) -> WorkerPool:
        if self._pool is None:
            self._pool = WorkerPool(self.context.threads)
        return self._pool

    def solver(self) -> ScipyLeastSquaresSolver:
        if self._solver is None:
            self._solver = ScipyLeastSquaresSolver()
        return self._solver

    def result_writer(self) -> ResultWriter:
        return ResultWriter(self.context.out)

    # Models

    def photon_model(self, repetitions: Optional[int] = None) -> PhotonModel:
        s = self.settings
        return PhotonModel(s.P_CLICK_MS0, s.P_NOCLICK_MS1, s.DD_REPETITIONS if repetitions is None else repetitions)

    def trace_model(self) -> TimeTraceModel:
        s = self.settings
        return TimeTraceModel.calibrated(
            s.HIGH_BIN_FRACTION,
            scramble_probability=s.TRACE_SCRAMBLE_PROBABILITY,
            bin_size=s.TRACE_BIN_SIZE,
        )

    def readout_model(self, **overrides) -> ReadoutModel:
        s = self.settings
        values = dict(
            p_a=s.READOUT_P_A,
            p_b=s.READOUT_P_B,
            prior_a=s.READOUT_PRIOR_A,
            contrast_decay=s.READOUT_CONTRAST_DECAY,
            k=s.READOUT_HERALD_K,
            n_a=s.READOUT_HERALD_N_A,
            n_b=s.READOUT_HERALD_N_B,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return ReadoutModel(**values)

    # Application services

    def spectro_service(self) -> SpectroService:
        return SpectroService(self.context)

    def dynamics_service(self, repetitions: Optional[int] = None) -> DynamicsService:
        return DynamicsService(self.context, self.photon_model(repetitions), self.trace_model())

    def rf_service(self) -> RFService:
        s = self.settings
        return RFService(
            self.context,
            rabi_khz=s.RF_RABI_KHZ,
            steps_per_period=s.RF_STEPS_PER_PERIOD,
            threshold=s.RF_RETENTION_THRESHOLD,
            snap_tolerance=s.RF_SNAP_TOLERANCE_MHZ,
        )

    def imaging_service(self) -> ImagingService:
        s = self.settings
        return ImagingService(
            self.context,
            self.solver(),
            map_fn=self.worker_pool().map,
            r_bounds=(s.FIT_R_MIN_NM, s.FIT_R_MAX_NM),
            position_bounds=(s.BENCH_R_MIN_NM, s.BENCH_R_MAX_NM),
        )

    def noise_service(self) -> NoiseService:
        return NoiseService(self.context, map_fn=self.worker_pool().map)

    def protocol_service(self) -> ProtocolService:
        s = self.settings
        return ProtocolService(
            self.context,
            total_readouts=s.INIT_READOUTS,
            final_threshold=s.INIT_FINAL_THRESHOLD,
            measurement_time_s=s.MEASUREMENT_TIME_US * 1e-6,
            overhead_measurements=s.SCRAMBLE_OVERHEAD_MEASUREMENTS,
        )


@lru_cache(maxsize=1)
def get_container() -> Container:
    """Get singleton container instance."""
    return Container()
