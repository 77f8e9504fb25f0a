"""Monte Carlo estimate value object."""

import math
from dataclasses import dataclass

import numpy as np

from domain.errors import DomainValidationError


@dataclass(frozen=True)
class MonteCarloEstimate:
    """A point estimate with its standard error and the number of trials behind it."""

    value: float
    stderr: float
    trials: int

    def __post_init__(self):
        if self.trials < 0:
            raise DomainValidationError("trials must be nonnegative")
        if self.stderr < 0.0 or not math.isfinite(self.stderr):
            raise DomainValidationError("standard error must be finite and nonnegative")

    @classmethod
    def exact(cls, value: float) -> "MonteCarloEstimate":
        """A deterministic value carried in estimate form."""
        return cls(float(value), 0.0, 0)

    @classmethod
    def from_indicators(cls, hits: int, trials: int) -> "MonteCarloEstimate":
        """Bernoulli proportion with the plug-in standard error."""
        if trials < 1:
            raise DomainValidationError("at least one trial is required")
        p = hits / trials
        return cls(p, math.sqrt(max(p * (1.0 - p), 0.0) / trials), trials)

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "MonteCarloEstimate":
        """Sample mean with standard error s / sqrt(m)."""
        samples = np.asarray(samples, dtype=np.float64)
        m = int(samples.size)
        if m < 1:
            raise DomainValidationError("at least one sample is required")
        stderr = float(np.std(samples, ddof=1) / math.sqrt(m)) if m > 1 else 0.0
        return cls(float(np.mean(samples)), stderr, m)

    def scaled(self, factor: float) -> "MonteCarloEstimate":
        return MonteCarloEstimate(self.value * factor, self.stderr * abs(factor), self.trials)

    def upper(self, sigmas: float = 3.0) -> float:
        return self.value + sigmas * self.stderr

    def lower(self, sigmas: float = 3.0) -> float:
        return self.value - sigmas * self.stderr
