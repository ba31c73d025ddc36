"""Spin model rules and tolerances."""

import numpy as np

from .exceptions import NonHermitianOperatorError

HERMITIAN_RTOL = 1e-10
SUPPORTED_SPINS = (0.5, 1.0)


class SpinRules:
    """Validation rules for spin operators."""

    @staticmethod
    def validate_hermitian(matrix: np.ndarray) -> None:
        """
        Validate that a square matrix equals its conjugate transpose.

        Raises:
            NonHermitianOperatorError: If the relative Frobenius deviation is too large
        """
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise NonHermitianOperatorError(
                f"Operator must be square, got shape {matrix.shape}",
                details={"shape": list(matrix.shape)}
            )
        norm = np.linalg.norm(matrix)
        deviation = np.linalg.norm(matrix - matrix.conj().T)
        if deviation > HERMITIAN_RTOL * max(norm, 1.0):
            raise NonHermitianOperatorError(
                "Operator is not Hermitian",
                details={"deviation": float(deviation), "norm": float(norm)}
            )
