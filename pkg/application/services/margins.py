"""
Exact margins, margin losses and true losses of halfspaces.

Also hosts the lifting reduction that embeds every point on the unit sphere
of one extra dimension while scaling all margins by a constant c_gamma.
"""

import math

import numpy as np

from domain.errors import DimensionMismatchError, DomainValidationError, PreconditionError
from domain.value_objects.labeled_data import DiscreteDistribution, LabeledPoint, Sample
from domain.value_objects.unit_vector import NORM_TOLERANCE, ArrayLike, UnitVector

# Largest lifting constant for which the Lipschitz analysis applies.
DEFAULT_C_GAMMA = 1.0 / math.sqrt(2.0)


def _check_dim(w: UnitVector, dim: int) -> None:
    if w.dim != dim:
        raise DimensionMismatchError(w.dim, dim, "point")


def margins_of(w: UnitVector, features: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Row-wise y_j <w, x_j> for an m x d feature array."""
    features = np.asarray(features, dtype=np.float64)
    _check_dim(w, int(features.shape[1]))
    return np.asarray(labels, dtype=np.float64) * (features @ w.coords)


def margin(w: UnitVector, point: LabeledPoint) -> float:
    """The signed margin y<w, x>."""
    _check_dim(w, point.dim)
    return float(point.y * (w.coords @ point.x))


def margin_loss_sample(w: UnitVector, sample: Sample, gamma: float) -> float:
    """Fraction of the sample with margin at most gamma (ties count as losses)."""
    m = margins_of(w, sample.features, sample.labels)
    return float(np.count_nonzero(m <= gamma)) / sample.n


def margin_loss_dist(w: UnitVector, dist: DiscreteDistribution, gamma: float) -> float:
    """Exact probability mass of support points with margin at most gamma."""
    m = margins_of(w, dist.features, dist.labels)
    return float(np.sum(dist.weights[m <= gamma]))


def true_loss(w: UnitVector, dist: DiscreteDistribution) -> float:
    """
    Pr[sign(<w, x>) != y] under ``dist``.

    sign(0) is 0, which never equals a label, so points on the hyperplane are
    always errors.
    """
    _check_dim(w, dist.dim)
    predictions = np.sign(dist.features @ w.coords)
    return float(np.sum(dist.weights[predictions != dist.labels]))


def sample_true_loss(w: UnitVector, sample: Sample) -> float:
    """Training error of ``w`` with the same sign(0) convention as ``true_loss``."""
    _check_dim(w, sample.dim)
    predictions = np.sign(sample.features @ w.coords)
    return float(np.count_nonzero(predictions != sample.labels)) / sample.n


def _check_c_gamma(c_gamma: float) -> None:
    if not 0.0 < c_gamma < 1.0:
        raise PreconditionError("lift", f"c_gamma={c_gamma!r} must lie in (0, 1)")


def _lift_rows(features: np.ndarray, c_gamma: float) -> np.ndarray:
    _check_c_gamma(c_gamma)
    squared = np.sum(features * features, axis=1)
    if np.any(squared > (1.0 + NORM_TOLERANCE) ** 2):
        raise PreconditionError("lift", "every point must satisfy ||x|| <= 1")
    last = np.sqrt(np.clip(1.0 - c_gamma * c_gamma * squared, 0.0, None))
    return np.column_stack([c_gamma * features, last])


def lift_point(x: ArrayLike, c_gamma: float = DEFAULT_C_GAMMA) -> np.ndarray:
    """(c_gamma x, sqrt(1 - c_gamma^2 ||x||^2)), a point on the unit sphere."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DomainValidationError("lift_point expects a single vector")
    return _lift_rows(x[np.newaxis, :], c_gamma)[0]


def lift_hypothesis(w: UnitVector) -> UnitVector:
    """w x {0}: the hypothesis padded with a zero coordinate."""
    return UnitVector(np.append(w.coords, 0.0))


def lift_sample(sample: Sample, c_gamma: float = DEFAULT_C_GAMMA) -> Sample:
    return Sample(_lift_rows(sample.features, c_gamma), sample.labels)


def lift_distribution(
    dist: DiscreteDistribution, c_gamma: float = DEFAULT_C_GAMMA
) -> DiscreteDistribution:
    return DiscreteDistribution(_lift_rows(dist.features, c_gamma), dist.labels, dist.weights)
