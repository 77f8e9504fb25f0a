"""Parameters of the adversarial lower-bound construction."""

from dataclasses import dataclass
from typing import Sequence, Tuple

from domain.errors import InvalidLowerBoundConfigError

_INTEGRALITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LowerBoundConfig:
    """
    Levels 1..k with target losses tau_i; level i holds 2^i / tau_i points.

    Every point gets its own designated coordinate after the first k shared
    coordinates, so the ambient dimension is k + m.
    """

    k: int
    taus: Tuple[float, ...]

    def __post_init__(self):
        """Validate the construction invariants."""
        taus = tuple(float(t) for t in self.taus)
        object.__setattr__(self, "taus", taus)
        if self.k < 1:
            raise InvalidLowerBoundConfigError(f"k={self.k} must be at least 1")
        if len(taus) != self.k:
            raise InvalidLowerBoundConfigError(f"expected {self.k} tau values, got {len(taus)}")
        for level, tau in enumerate(taus, start=1):
            if not 0.0 < tau <= 1.0:
                raise InvalidLowerBoundConfigError(f"tau_{level}={tau!r} outside (0, 1]")
            size = 2 ** level / tau
            if abs(size - round(size)) > _INTEGRALITY_TOLERANCE * max(1.0, size):
                raise InvalidLowerBoundConfigError(
                    f"2^{level}/tau_{level} = {size!r} is not an integer"
                )

    @classmethod
    def of(cls, taus: Sequence[float]) -> "LowerBoundConfig":
        return cls(len(taus), tuple(taus))

    def level_size(self, level: int) -> int:
        """|X_level| = 2^level / tau_level."""
        self.check_level(level)
        return int(round(2 ** level / self.taus[level - 1]))

    @property
    def level_sizes(self) -> Tuple[int, ...]:
        return tuple(self.level_size(i) for i in range(1, self.k + 1))

    def level_offset(self, level: int) -> int:
        """Index of the first point of X_level in the concatenated support."""
        self.check_level(level)
        return sum(self.level_sizes[: level - 1])

    @property
    def m(self) -> int:
        return sum(self.level_sizes)

    @property
    def dimension(self) -> int:
        return self.k + self.m

    def check_level(self, level: int) -> None:
        if not 1 <= level <= self.k:
            raise InvalidLowerBoundConfigError(f"level {level} outside [1, {self.k}]")


@dataclass(frozen=True)
class WitnessSpec:
    """A level i and the 2^i points of X_i (local indices) the witness misclassifies."""

    level: int
    members: Tuple[int, ...]

    def __post_init__(self):
        members = tuple(int(j) for j in self.members)
        object.__setattr__(self, "members", members)
        if self.level < 1:
            raise InvalidLowerBoundConfigError(f"level {self.level} must be at least 1")
        if len(members) != 2 ** self.level:
            raise InvalidLowerBoundConfigError(
                f"|T| = {len(members)} but level {self.level} needs exactly {2 ** self.level}"
            )
        if len(set(members)) != len(members):
            raise InvalidLowerBoundConfigError("T must not repeat points")

    def validate_for(self, config: LowerBoundConfig) -> None:
        config.check_level(self.level)
        size = config.level_size(self.level)
        if any(not 0 <= j < size for j in self.members):
            raise InvalidLowerBoundConfigError(f"T indices must lie in [0, {size})")
