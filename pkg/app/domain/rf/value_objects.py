"""RF simulation value objects."""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from app.config.constants import REFERENCE_TRUTH_TABLES, TRUTH_TABLE_COLUMNS
from app.domain.common.value_object import ValueObject
from app.domain.spins.value_objects import JahnTellerAxis


@dataclass(frozen=True)
class RFPulse(ValueObject):
    """
    Linearly polarized RF drive.

    frequency in MHz, rabi_khz is the drive amplitude Omega in kHz, phase in
    rad and duration in us. Without a duration the pulse lasts 2/Omega.
    """
    frequency: float
    rabi_khz: float = 250.0
    phase: float = 0.0
    duration: Optional[float] = None

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError(f"Drive frequency must be positive, got {self.frequency}")
        if not self.rabi_khz > 0:
            raise ValueError(f"Rabi amplitude must be positive, got {self.rabi_khz}")
        if self.duration is not None and self.duration < 0:
            raise ValueError(f"Duration cannot be negative, got {self.duration}")

    @property
    def amplitude_mhz(self) -> float:
        return self.rabi_khz / 1000.0

    @property
    def length(self) -> float:
        """Pulse duration in us."""
        if self.duration is not None:
            return self.duration
        return 2.0 / self.amplitude_mhz

    @property
    def period(self) -> float:
        return 1.0 / self.frequency

    @property
    def n_periods(self) -> int:
        return int(math.ceil(self.length * self.frequency - 1e-9))

    def at_frequency(self, frequency: float) -> "RFPulse":
        return RFPulse(frequency, self.rabi_khz, self.phase, self.duration)


def _parse_bits(bits) -> Tuple[int, ...]:
    if isinstance(bits, str):
        bits = tuple(int(c) for c in bits)
    bits = tuple(int(b) for b in bits)
    if len(bits) != len(TRUTH_TABLE_COLUMNS) or any(b not in (0, 1) for b in bits):
        raise ValueError(f"Truth-table rows need six 0/1 bits, got {bits}")
    return bits


@dataclass(frozen=True)
class TruthTableRow(ValueObject):
    """Response bits for one drive, ordered like TRUTH_TABLE_COLUMNS."""
    listed_mhz: float
    bits: Tuple[int, ...]
    drive_mhz: Optional[float] = None

    def __post_init__(self):
        self._set("bits", _parse_bits(self.bits))
        if self.drive_mhz is None:
            self._set("drive_mhz", self.listed_mhz)

    def responds(self, label: str) -> bool:
        return bool(self.bits[TRUTH_TABLE_COLUMNS.index(label)])

    @property
    def bit_string(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class TruthTable(ValueObject):
    """Rabi response table of one JT axis."""
    jt: JahnTellerAxis
    rows: Tuple[TruthTableRow, ...] = field(default_factory=tuple)

    def row_for(self, frequency: float, tolerance: float) -> Optional[TruthTableRow]:
        """Row whose listed frequency lies within tolerance, if any."""
        best = None
        for row in self.rows:
            offset = abs(row.listed_mhz - frequency)
            if offset <= tolerance and (best is None or offset < abs(best.listed_mhz - frequency)):
                best = row
        return best

    def as_dict(self) -> Dict[float, str]:
        return {row.listed_mhz: row.bit_string for row in self.rows}

    @classmethod
    def reference(cls, axis: str) -> "TruthTable":
        """Tabulated response table at the reference field; paired listings become two rows."""
        jt = JahnTellerAxis(axis)
        rows = []
        for frequencies, bits in REFERENCE_TRUTH_TABLES[jt.axis]:
            for frequency in frequencies:
                rows.append(TruthTableRow(listed_mhz=frequency, bits=bits))
        return cls(jt=jt, rows=tuple(rows))
