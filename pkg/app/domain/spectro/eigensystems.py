"""Labeled eigendecomposition and single-defect dressed bases."""

import logging
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg

from app.config.constants import NV_LABELS, P1_LABELS
from app.domain.spins.hamiltonians import (
    build_nv_hamiltonian,
    build_p1_hamiltonian,
    nv_spin_operators,
    p1_electron_operators,
    p1_nuclear_operators,
)
from app.domain.spins.value_objects import (
    HermitianOperator,
    JahnTellerAxis,
    MagneticField,
    PhysicalConstants,
)
from .exceptions import DegenerateLabelingError
from .rules import LABEL_TIE_TOLERANCE, SpectroRules
from .value_objects import DressedBasis, LabeledEigensystem

logger = logging.getLogger(__name__)


def labeled_eigensystem(
    h: Union[HermitianOperator, np.ndarray],
    basis_labels: Sequence[str],
    tie_tolerance: float = LABEL_TIE_TOLERANCE,
    strict: bool = False,
) -> LabeledEigensystem:
    """
    Diagonalize h and label each eigenvector with a basis ket.

    Labels are assigned greedily by descending squared overlap, skipping
    labels and eigenvectors already used, so the assignment is a bijection.

    Raises:
        NonHermitianOperatorError: If h is not Hermitian
        DegenerateLabelingError: If strict and any label is ambiguous
    """
    if not isinstance(h, HermitianOperator):
        h = HermitianOperator(h)
    labels = tuple(basis_labels)
    SpectroRules.validate_labels(labels, h.dim)

    eigenvalues, vectors = linalg.eigh(h.matrix)
    weights = np.abs(vectors) ** 2  # weights[basis, eigenvector]

    flat_order = np.argsort(-weights, axis=None, kind="stable")
    assigned = np.full(h.dim, -1, dtype=int)
    used_basis = np.zeros(h.dim, dtype=bool)
    remaining = h.dim
    for flat in flat_order:
        basis_index, eig_index = np.unravel_index(flat, weights.shape)
        if assigned[eig_index] >= 0 or used_basis[basis_index]:
            continue
        assigned[eig_index] = basis_index
        used_basis[basis_index] = True
        remaining -= 1
        if remaining == 0:
            break

    overlaps = weights[assigned, np.arange(h.dim)]
    ambiguous = []
    for j in range(h.dim):
        top = np.sort(weights[:, j])[::-1]
        ambiguous.append(bool(h.dim > 1 and top[0] - top[1] < tie_tolerance))

    result = LabeledEigensystem(
        eigenvalues=eigenvalues,
        vectors=vectors,
        labels=tuple(labels[i] for i in assigned),
        overlaps=overlaps,
        ambiguous=tuple(ambiguous),
    )
    if strict and result.is_ambiguous:
        bad = [result.labels[j] for j in range(h.dim) if ambiguous[j]]
        raise DegenerateLabelingError(
            "Eigenvector labeling is ambiguous",
            details={"labels": bad, "tie_tolerance": tie_tolerance}
        )
    logger.debug(f"Labeled {h.dim}-dim eigensystem, min overlap {result.min_overlap:.4f}")
    return result


def _dress(h: HermitianOperator, labels, operators) -> DressedBasis:
    system = labeled_eigensystem(h, labels, strict=True)
    energies, vectors = system.ordered_by(labels)
    transformed = np.array([vectors.conj().T @ op @ vectors for op in operators])
    for array in (energies, vectors, transformed):
        array.setflags(write=False)
    return DressedBasis(labels=tuple(labels), energies=energies, vectors=vectors, operators=transformed)


@lru_cache(maxsize=4096)
def p1_dressed_basis(
    b: MagneticField,
    jt: JahnTellerAxis,
    constants: Optional[PhysicalConstants] = None,
) -> DressedBasis:
    """
    Single-P1 eigenbasis ordered like P1_LABELS, with the electron spin
    operators J expressed in it.

    Raises:
        DegenerateLabelingError: If any single-P1 eigenstate is ambiguous
    """
    constants = constants or PhysicalConstants()
    h = build_p1_hamiltonian(b, jt, constants)
    return _dress(h, P1_LABELS, p1_electron_operators())


@lru_cache(maxsize=1024)
def nv_dressed_basis(
    b: MagneticField,
    constants: Optional[PhysicalConstants] = None,
) -> DressedBasis:
    """NV eigenbasis ordered like NV_LABELS, with S expressed in it."""
    constants = constants or PhysicalConstants()
    h = build_nv_hamiltonian(b, constants)
    return _dress(h, NV_LABELS, nv_spin_operators())


def p1_nuclear_dressed_operators(basis: DressedBasis) -> np.ndarray:
    """Nitrogen spin operators I in a single-P1 dressed basis."""
    v = basis.vectors
    return np.array([v.conj().T @ op @ v for op in p1_nuclear_operators()])


def transition_gaps(basis: DressedBasis) -> np.ndarray:
    """Absolute energy differences |E_i - E_j| (MHz) for i < j."""
    e = basis.energies
    i, j = np.triu_indices(len(e), k=1)
    return np.abs(e[j] - e[i])
