"""
Explicit hard distribution and witness hyperplane for the margin lower bound.

Level i holds |X_i| = 2^i / tau_i points. Every point shares the first k
coordinates (2^(-4/2), ..., 2^(-(k+3)/2)) and owns one designated coordinate
equal to 1/sqrt(2). The witness for (i, T) puts 1/sqrt(2) on coordinate i and
-2^(-(i+1)/2) on the designated coordinate of each point of T, so every point
outside T has margin exactly gamma_i = 2^(-(i+4)/2) and every point of T is
misclassified.
"""

import math
import time
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from application.services.margins import margin_loss_sample, margins_of, true_loss
from domain.value_objects.labeled_data import DiscreteDistribution, Sample
from domain.value_objects.lower_bound_config import LowerBoundConfig, WitnessSpec
from domain.value_objects.unit_vector import UnitVector
from infrastructure.logging.logger_factory import get_module_logger
from infrastructure.parallel.trial_executor import TrialExecutor, default_executor

logger = get_module_logger(__name__)

DESIGNATED_VALUE = 1.0 / math.sqrt(2.0)

# Default evaluation margin gamma_i (1 - MARGIN_SHRINK) keeps the points at margin
# exactly gamma_i out of the loss. Strict mode evaluates at
# gamma_i (1 + STRICT_TIE_TOLERANCE) so that float ties at gamma_i count as losses.
MARGIN_SHRINK = 1e-9
STRICT_TIE_TOLERANCE = 1e-12


def gamma_level(level: int) -> float:
    """gamma_i = 2^(-(i+4)/2)."""
    if level < 1:
        raise ValueError(f"level {level} must be at least 1")
    return 2.0 ** (-(level + 4) / 2.0)


def shared_prefix(k: int) -> np.ndarray:
    """The first k coordinates common to every point: x_j = 2^(-(j+3)/2)."""
    return 2.0 ** (-(np.arange(1, k + 1) + 3) / 2.0)


def build_distribution(cfg: LowerBoundConfig) -> DiscreteDistribution:
    """Uniform distribution over the union of the levels, all labels +1."""
    m = cfg.m
    features = np.zeros((m, cfg.dimension))
    features[:, : cfg.k] = shared_prefix(cfg.k)
    features[np.arange(m), cfg.k + np.arange(m)] = DESIGNATED_VALUE
    return DiscreteDistribution.uniform_arrays(features, np.ones(m, dtype=np.int64))


def witness(cfg: LowerBoundConfig, spec: WitnessSpec) -> UnitVector:
    spec.validate_for(cfg)
    i = spec.level
    coords = np.zeros(cfg.dimension)
    coords[i - 1] = DESIGNATED_VALUE
    designated = cfg.k + cfg.level_offset(i) + np.asarray(spec.members, dtype=np.int64)
    coords[designated] = -(2.0 ** (-(i + 1) / 2.0))
    return UnitVector(coords)


@dataclass(frozen=True)
class WitnessGeometry:
    """Exactness measurements of one witness against the construction."""

    norm_error: float
    max_deviation: float
    max_member_margin: float

    def is_exact(self, tolerance: float = 1e-12) -> bool:
        return (
            self.norm_error <= tolerance
            and self.max_deviation <= tolerance
            and self.max_member_margin < 0.0
        )


def witness_geometry(cfg: LowerBoundConfig, spec: WitnessSpec) -> WitnessGeometry:
    dist = build_distribution(cfg)
    w = witness(cfg, spec)
    margins = margins_of(w, dist.features, dist.labels)
    members = cfg.level_offset(spec.level) + np.asarray(spec.members, dtype=np.int64)
    in_t = np.zeros(cfg.m, dtype=bool)
    in_t[members] = True
    deviation = np.abs(margins[~in_t] - gamma_level(spec.level))
    return WitnessGeometry(
        norm_error=abs(float(np.linalg.norm(w.coords)) - 1.0),
        max_deviation=float(np.max(deviation, initial=0.0)),
        max_member_margin=float(np.max(margins[in_t])),
    )


def max_margin_deviation(cfg: LowerBoundConfig, spec: WitnessSpec) -> float:
    """max |<w, x> - gamma_i| over support points outside T."""
    return witness_geometry(cfg, spec).max_deviation


def disjoint_probability_lower_bound(cfg: LowerBoundConfig, level: int, n: int) -> float:
    """(1 - 2^i / m)^n = Pr[S misses a fixed T], a lower bound on Pr[some T is missed]."""
    cfg.check_level(level)
    return (1.0 - 2 ** level / cfg.m) ** n


@dataclass(frozen=True)
class GapTrial:
    """One row of the gap experiment."""

    trial: int
    margin: float
    empirical_margin_loss: float
    true_loss: float
    gap: float
    tau: float
    disjoint: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def least_represented(counts: np.ndarray, size: int) -> np.ndarray:
    """Indices of the ``size`` smallest counts, ties broken by index."""
    return np.sort(np.argsort(counts, kind="stable")[:size])


def gap_experiment(
    cfg: LowerBoundConfig,
    level: int,
    n: int,
    trials: int,
    seed: int,
    strict: bool = False,
    executor: Optional[TrialExecutor] = None,
) -> List[GapTrial]:
    """
    Per trial: draw S ~ D^n, let T be the 2^i least represented points of X_i,
    and report the witness's margin loss on S next to its exact true loss.
    """
    cfg.check_level(level)
    if n < 1:
        raise ValueError(f"n={n} must be at least 1")
    executor = executor or default_executor()
    dist = build_distribution(cfg)
    offset = cfg.level_offset(level)
    size = cfg.level_size(level)
    gamma_i = gamma_level(level)
    if strict:
        eval_margin = gamma_i * (1.0 + STRICT_TIE_TOLERANCE)
    else:
        eval_margin = gamma_i * (1.0 - MARGIN_SHRINK)

    def run(index: int, rng: np.random.Generator) -> GapTrial:
        drawn = dist.draw_indices(n, rng)
        local = drawn[(drawn >= offset) & (drawn < offset + size)] - offset
        counts = np.bincount(local, minlength=size)
        members = least_represented(counts, 2 ** level)
        w = witness(cfg, WitnessSpec(level, tuple(members)))
        sample = Sample(dist.features[drawn], dist.labels[drawn])
        empirical = margin_loss_sample(w, sample, eval_margin)
        loss = true_loss(w, dist)
        return GapTrial(
            trial=index,
            margin=eval_margin,
            empirical_margin_loss=empirical,
            true_loss=loss,
            gap=loss - empirical,
            tau=cfg.taus[level - 1],
            disjoint=bool(np.all(counts[members] == 0)),
        )

    started = time.perf_counter()
    rows = executor.map(run, seed, trials)
    logger.log_experiment("lowerbound_gap", trials, int((time.perf_counter() - started) * 1000))
    return rows
