"""Spectroscopy value objects."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from app.domain.common.value_object import ValueObject
from app.domain.spins.value_objects import JahnTellerAxis
from .exceptions import DegenerateLabelingError


@dataclass(frozen=True, eq=False)
class LabeledEigensystem(ValueObject):
    """
    Eigenpairs with product-basis labels assigned by maximum overlap.

    eigenvalues are ascending (MHz); vectors holds eigenvectors as columns;
    labels[j] and overlaps[j] belong to eigenvector j. ambiguous[j] is set
    when the top two overlaps of eigenvector j are within the tie tolerance.
    """
    eigenvalues: np.ndarray
    vectors: np.ndarray
    labels: Tuple[str, ...]
    overlaps: np.ndarray
    ambiguous: Tuple[bool, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.eigenvalues):
            raise ValueError("Every eigenvalue needs one label")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("Labels must form a bijection onto the basis")
        if np.any(self.overlaps < 0.0) or np.any(self.overlaps > 1.0 + 1e-9):
            raise ValueError("Overlaps must lie in [0, 1]")

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def min_overlap(self) -> float:
        return float(np.min(self.overlaps))

    @property
    def is_ambiguous(self) -> bool:
        return any(self.ambiguous)

    def index_of(self, label: str) -> int:
        """
        Eigenvector index carrying a label.

        Raises:
            DegenerateLabelingError: If the eigenvector's label is ambiguous
        """
        try:
            index = self.labels.index(label)
        except ValueError:
            raise ValueError(f"Unknown basis label: {label}") from None
        if self.ambiguous[index]:
            raise DegenerateLabelingError(
                f"Eigenstate labeled {label} has no unique dominant basis state",
                details={"label": label, "overlap": float(self.overlaps[index])}
            )
        return index

    def energy(self, label: str) -> float:
        """Eigenvalue (MHz) of the eigenstate with the given label."""
        return float(self.eigenvalues[self.index_of(label)])

    def ordered_by(self, basis_labels) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors reordered to follow basis_labels."""
        order = [self.index_of(label) for label in basis_labels]
        return self.eigenvalues[order], self.vectors[:, order]


@dataclass(frozen=True, eq=False)
class DressedBasis(ValueObject):
    """
    Eigenbasis of a single defect, ordered like its bare basis labels.

    operators holds the spin operators (x, y, z) transformed into that
    eigenbasis as an array of shape (3, dim, dim).
    """
    labels: Tuple[str, ...]
    energies: np.ndarray
    vectors: np.ndarray
    operators: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"Unknown state label: {label}") from None


@dataclass(frozen=True)
class EffectiveCouplings(ValueObject):
    """X, Z, D1 and D2 for one configuration and flip-flop pair, in kHz."""
    jt: JahnTellerAxis
    m_I: Optional[int]
    flip_flop_states: Tuple[str, str]
    X: float
    Z: float
    D1: float
    D2: float

    def __post_init__(self):
        if len(self.flip_flop_states) != 2:
            raise ValueError("A flip-flop pair needs exactly two states")
        if abs(self.Z - (self.D1 - self.D2)) > 1e-9 * max(1.0, abs(self.D1), abs(self.D2)):
            raise ValueError("Detuning must equal D1 - D2")

    @property
    def is_fixed_nitrogen(self) -> bool:
        a, b = self.flip_flop_states
        return a[0] == b[0]
