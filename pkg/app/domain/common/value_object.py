"""Base value object for immutable physical inputs and results."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ValueObject:
    """Immutable value compared by its fields."""

    def evolve(self, **changes):
        """Copy with some fields replaced; the copy is validated again."""
        return replace(self, **changes)

    def _set(self, name: str, value) -> None:
        """Normalize a field from inside __post_init__."""
        object.__setattr__(self, name, value)
