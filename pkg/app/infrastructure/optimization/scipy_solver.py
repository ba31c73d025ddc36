"""Least-squares solver backed by scipy.optimize.least_squares."""

import logging
from typing import Callable

import numpy as np
from scipy.optimize import least_squares

from app.domain.imaging.interfaces import ILeastSquaresSolver
from app.domain.imaging.value_objects import LeastSquaresResult

logger = logging.getLogger(__name__)


class ScipyLeastSquaresSolver(ILeastSquaresSolver):
    """
    Levenberg-Marquardt with a finite-difference Jacobian.

    Falls back to the trust-region reflective method when there are fewer
    residuals than parameters, which "lm" does not accept.
    """

    def __init__(self, diff_step: float = 1e-6, max_nfev: int = 2000, xtol: float = 1e-12, ftol: float = 1e-12):
        self._diff_step = diff_step
        self._max_nfev = max_nfev
        self._xtol = xtol
        self._ftol = ftol

    def solve(
        self,
        residuals: Callable[[np.ndarray], np.ndarray],
        x0: np.ndarray,
    ) -> LeastSquaresResult:
        x0 = np.asarray(x0, dtype=float)
        n_residuals = np.asarray(residuals(x0)).size
        method = "lm" if n_residuals >= x0.size else "trf"
        result = least_squares(
            residuals,
            x0,
            method=method,
            diff_step=self._diff_step,
            max_nfev=self._max_nfev,
            xtol=self._xtol,
            ftol=self._ftol,
        )
        logger.debug(f"least_squares ({method}): cost {result.cost:.3e} after {result.nfev} evaluations")
        return LeastSquaresResult(
            x=result.x,
            residuals=result.fun,
            jacobian=result.jac,
            success=bool(result.success),
            message=str(result.message),
            nfev=int(result.nfev),
        )
