"""Scalar inputs shared by the closed-form generalization bounds."""

import math
from dataclasses import dataclass, replace
from enum import Enum

from domain.errors import DomainValidationError


class BoundKind(Enum):
    """The generalization bounds evaluated by the laboratory."""
    BARTLETT_HARD = "bartlett_hard"
    BARTLETT_SOFT = "bartlett_soft"
    MCALLESTER = "mcallester"
    SOTA = "sota"
    TIGHT = "tight"
    LOWER = "lower"


@dataclass(frozen=True)
class BoundInputs:
    """
    Margin gamma, sample count n, failure probability delta, empirical margin
    loss and the multiplicative constant c.

    delta = 1 is admitted so that ln(e/delta) = 1 can be used in worked
    examples; n is a real number >= 1 for the same reason.
    """

    gamma: float
    n: float
    delta: float
    empirical_loss: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        """Validate ranges."""
        for name in ("gamma", "n", "delta", "empirical_loss", "c"):
            if not math.isfinite(getattr(self, name)):
                raise DomainValidationError(f"{name} must be finite")
        if not 0.0 < self.gamma <= 1.0:
            raise DomainValidationError(f"gamma={self.gamma!r} outside (0, 1]")
        if self.n < 1.0:
            raise DomainValidationError(f"n={self.n!r} must be at least 1")
        if not 0.0 < self.delta <= 1.0:
            raise DomainValidationError(f"delta={self.delta!r} outside (0, 1]")
        if not 0.0 <= self.empirical_loss <= 1.0:
            raise DomainValidationError(f"empirical_loss={self.empirical_loss!r} outside [0, 1]")
        if self.c <= 0.0:
            raise DomainValidationError(f"c={self.c!r} must be positive")

    @property
    def scaled_n(self) -> float:
        """gamma^2 * n, the effective sample size of the margin terms."""
        return self.gamma * self.gamma * self.n

    def with_changes(self, **changes) -> "BoundInputs":
        return replace(self, **changes)
