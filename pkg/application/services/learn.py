"""Margin perceptron and the learned-hypothesis gap experiment."""

import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from application.services.bounds import evaluate_all
from application.services.margins import margin_loss_sample, true_loss
from domain.errors import DomainValidationError, PreconditionError
from domain.value_objects.bound_inputs import BoundInputs, BoundKind
from domain.value_objects.labeled_data import DiscreteDistribution, Sample
from domain.value_objects.unit_vector import UnitVector
from infrastructure.logging.logger_factory import get_module_logger
from infrastructure.parallel.trial_executor import TrialExecutor, default_executor

logger = get_module_logger(__name__)

DEFAULT_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass(frozen=True)
class LearnerConfig:
    """Target margin, epoch budget and the seed of the epoch orderings."""

    target_margin: float = 0.0
    max_epochs: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.target_margin < 0.0:
            raise DomainValidationError(f"target_margin={self.target_margin!r} must be >= 0")
        if self.max_epochs < 1:
            raise DomainValidationError(f"max_epochs={self.max_epochs} must be at least 1")


@dataclass(frozen=True)
class PerceptronResult:
    w: UnitVector
    epochs: int
    updates: int
    converged: bool


def train_margin_perceptron(
    sample: Sample, cfg: LearnerConfig, rng: Optional[np.random.Generator] = None
) -> PerceptronResult:
    """
    Update w <- w + y x on every point with y<w, x> <= gamma ||w||.

    Points are visited in a fresh random order each epoch; zero vectors are
    skipped. Stops after an epoch without updates, else after ``max_epochs``
    and returns the normalised iterate with the smallest margin loss among
    the epoch ends. An epoch that ends at w = 0 contributes its last nonzero
    iterate instead, so contradictory samples still yield a hypothesis.

    Raises:
        PreconditionError: If every feature vector is zero
    """
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    features = sample.features
    labels = sample.labels.astype(np.float64)
    usable = np.linalg.norm(features, axis=1) > 0.0
    if not np.any(usable):
        raise PreconditionError("margin_perceptron", "sample has no nonzero feature vector")

    gamma = cfg.target_margin
    w = np.zeros(sample.dim)
    updates = 0
    best: Optional[Tuple[float, np.ndarray]] = None
    last_nonzero: Optional[np.ndarray] = None

    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(sample.n)
        xs, ys, ok = features[order], labels[order], usable[order]
        pos = 0
        updated = False
        while pos < sample.n:
            # first violator at or after pos under the current w
            violating = ok[pos:] & (ys[pos:] * (xs[pos:] @ w) <= gamma * np.linalg.norm(w))
            if not np.any(violating):
                break
            j = pos + int(np.argmax(violating))
            w = w + ys[j] * xs[j]
            updates += 1
            if np.any(w != 0.0):
                last_nonzero = w
            updated = True
            pos = j + 1

        if not updated:
            return PerceptronResult(UnitVector.from_direction(w), epoch, updates, True)

        iterate = w if np.any(w != 0.0) else last_nonzero
        if iterate is not None:
            candidate = iterate / np.linalg.norm(iterate)
            loss = margin_loss_sample(UnitVector(candidate), sample, gamma)
            if best is None or loss < best[0]:
                best = (loss, candidate)

    # the first epoch always updates from w = 0, so some iterate was scored
    assert best is not None
    logger.debug("Perceptron hit its epoch budget", {"updates": updates, "best_loss": best[0]})
    return PerceptronResult(UnitVector(best[1]), cfg.max_epochs, updates, False)


def margin_perceptron(sample: Sample, cfg: LearnerConfig) -> UnitVector:
    return train_margin_perceptron(sample, cfg).w


def mistake_budget(planted_margin: float) -> float:
    """4 / gamma*^2 updates suffice when training at half the planted margin."""
    return 4.0 / (planted_margin * planted_margin)


def planted_margin_distribution(
    d: int,
    support_size: int,
    margin: float,
    noise_rate: float = 0.0,
    seed: int = 0,
) -> Tuple[DiscreteDistribution, UnitVector]:
    """
    Uniform distribution on unit vectors separated by a random w* with margin
    at least ``margin``; a ``noise_rate`` fraction of labels is then flipped.
    """
    if d < 2 or support_size < 1:
        raise DomainValidationError("need d >= 2 and a nonempty support")
    if not 0.0 < margin < 1.0:
        raise DomainValidationError(f"margin={margin!r} outside (0, 1)")
    if not 0.0 <= noise_rate < 0.5:
        raise DomainValidationError(f"noise_rate={noise_rate!r} outside [0, 0.5)")
    rng = np.random.default_rng(seed)
    w_star = UnitVector.from_direction(rng.standard_normal(d))

    alignment = rng.uniform(margin, 1.0, support_size)
    u = rng.standard_normal((support_size, d))
    u -= np.outer(u @ w_star.coords, w_star.coords)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    labels = rng.choice(np.array([-1, 1]), support_size)
    features = labels[:, None] * (
        alignment[:, None] * w_star.coords + np.sqrt(1.0 - alignment**2)[:, None] * u
    )
    features /= np.maximum(np.linalg.norm(features, axis=1, keepdims=True), 1.0)

    flips = rng.random(support_size) < noise_rate
    labels = np.where(flips, -labels, labels)
    return DiscreteDistribution.uniform_arrays(features, labels), w_star


@dataclass
class GapRow:
    """One trained hypothesis: its losses and every bound evaluated at its margin loss."""

    trial: int
    empirical_margin_loss: float
    true_loss: float
    gap: float
    bounds: Dict[str, Optional[float]] = field(default_factory=dict)
    converged: bool = True

    @property
    def covered(self) -> Optional[bool]:
        """Whether the tight bound holds for this hypothesis."""
        value = self.bounds.get(BoundKind.TIGHT.value)
        return None if value is None else self.true_loss <= value

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trial": self.trial,
            "empirical_margin_loss": self.empirical_margin_loss,
            "true_loss": self.true_loss,
            "gap": self.gap,
            **self.bounds,
            "converged": self.converged,
            "covered": self.covered,
        }


def gap_vs_bounds(
    dist: DiscreteDistribution,
    n: int,
    gamma: float,
    delta: float,
    trials: int,
    seed: int,
    learner: Optional[LearnerConfig] = None,
    constants: Optional[Mapping[BoundKind, float]] = None,
    executor: Optional[TrialExecutor] = None,
) -> List[GapRow]:
    """
    Per trial: S ~ D^n, train the margin perceptron at ``gamma`` and compare the
    observed gap L_D(w) - L^gamma_S(w) with the bounds at L = L^gamma_S(w).
    """
    if n < 1:
        raise PreconditionError("gap_vs_bounds", f"n={n} must be at least 1")
    learner = learner or LearnerConfig(target_margin=gamma)
    executor = executor or default_executor()

    def run(index: int, rng: np.random.Generator) -> GapRow:
        sample = dist.sample(n, rng)
        result = train_margin_perceptron(sample, learner, rng)
        empirical = margin_loss_sample(result.w, sample, gamma)
        loss = true_loss(result.w, dist)
        inputs = BoundInputs(gamma=gamma, n=n, delta=delta, empirical_loss=empirical)
        values = evaluate_all(inputs, constants=constants)
        return GapRow(
            trial=index,
            empirical_margin_loss=empirical,
            true_loss=loss,
            gap=loss - empirical,
            bounds={kind.value: value for kind, value in values.items()},
            converged=result.converged,
        )

    started = time.perf_counter()
    rows = executor.map(run, seed, trials)
    logger.log_experiment("gap_vs_bounds", trials, int((time.perf_counter() - started) * 1000))
    return rows


GAP_METRICS = ["empirical_margin_loss", "true_loss", "gap"] + [kind.value for kind in BoundKind]


def summarize_gap_rows(
    rows: Sequence[GapRow], quantiles: Sequence[float] = DEFAULT_QUANTILES
) -> pd.DataFrame:
    """Quantiles of every numeric column plus the coverage rate, one row per quantile."""
    columns = ["quantile"] + GAP_METRICS + ["coverage"]
    if not rows:
        return pd.DataFrame(columns=columns)
    frame = pd.DataFrame([row.to_dict() for row in rows])
    numeric = frame[GAP_METRICS].astype(float)
    summary = numeric.quantile(list(quantiles))
    summary.index.name = "quantile"
    summary = summary.reset_index()
    covered = frame["covered"].dropna()
    summary["coverage"] = float(covered.mean()) if len(covered) else math.nan
    return summary[columns]
