"""Imaging domain interfaces (ports) - contracts for infrastructure implementations."""

from abc import ABC, abstractmethod
from typing import Callable

import numpy as np

from .value_objects import LeastSquaresResult


class ILeastSquaresSolver(ABC):
    """Interface for local damped least-squares minimization."""

    @abstractmethod
    def solve(
        self,
        residuals: Callable[[np.ndarray], np.ndarray],
        x0: np.ndarray,
    ) -> LeastSquaresResult:
        """
        Minimize the sum of squared residuals from one starting point.

        Args:
            residuals: Maps a parameter vector to the residual vector
            x0: Starting parameters

        Returns:
            LeastSquaresResult with the converged point and Jacobian
        """
        pass
