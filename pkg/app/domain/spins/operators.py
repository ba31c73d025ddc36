"""Angular momentum operators and rotation algebra."""

import math
from typing import Sequence, Tuple

import numpy as np

from .exceptions import InvalidSpinError
from .value_objects import HermitianOperator, JahnTellerAxis

OperatorTriple = Tuple[HermitianOperator, HermitianOperator, HermitianOperator]


def spin_operators(s: float) -> OperatorTriple:
    """
    Spin matrices (Sx, Sy, Sz) in the Zeeman basis, highest projection first.

    Raises:
        InvalidSpinError: If s is not 1/2 or 1
    """
    if s not in (0.5, 1.0, 1):
        raise InvalidSpinError(f"Unsupported spin quantum number {s}", details={"s": s})

    m = np.arange(s, -s - 1, -1.0)
    dim = len(m)
    s_plus = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        s_plus[k - 1, k] = math.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    s_minus = s_plus.conj().T

    sx = (s_plus + s_minus) / 2.0
    sy = (s_plus - s_minus) / 2.0j
    sz = np.diag(m).astype(complex)
    return HermitianOperator(sx), HermitianOperator(sy), HermitianOperator(sz)


def rotation_matrix(alpha: float, beta: float) -> np.ndarray:
    """Two-angle rotation R(alpha, beta) for axial tensors; angles in degrees."""
    a = math.radians(alpha)
    b = math.radians(beta)
    ca, sa = math.cos(a), math.sin(a)
    cb, sb = math.cos(b), math.sin(b)
    return np.array([
        [cb * ca, cb * sa, -sb],
        [-sa, ca, 0.0],
        [sb * ca, sb * sa, cb],
    ])


def rotate_tensor(m_diag: Sequence[float], jt: JahnTellerAxis) -> np.ndarray:
    """Tensor R^T diag(m_diag) R in the NV frame for the given Jahn-Teller axis."""
    r = rotation_matrix(jt.alpha, jt.beta)
    tensor = r.T @ np.diag(np.asarray(m_diag, dtype=float)) @ r
    return (tensor + tensor.T) / 2.0


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def embed(op: np.ndarray, position: int, dims: Sequence[int]) -> np.ndarray:
    """Embed a single-factor operator into a tensor product space."""
    result = np.ones((1, 1), dtype=complex)
    for index, dim in enumerate(dims):
        factor = op if index == position else identity(dim)
        result = np.kron(result, factor)
    return result


def as_matrices(ops) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Accept HermitianOperator triples or plain arrays."""
    return tuple(o.matrix if isinstance(o, HermitianOperator) else np.asarray(o, dtype=complex) for o in ops)
