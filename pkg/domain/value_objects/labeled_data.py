"""Labeled points, samples and finite distributions over the unit ball."""

from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from domain.errors import DimensionMismatchError, DomainValidationError, EmptySampleError
from domain.value_objects.unit_vector import NORM_TOLERANCE, ArrayLike, as_vector

WEIGHT_TOLERANCE = 1e-12


def _check_labels(labels: np.ndarray) -> None:
    if not np.all((labels == 1) | (labels == -1)):
        raise DomainValidationError("labels must be -1 or +1")


def _check_ball(features: np.ndarray) -> None:
    norms = np.linalg.norm(features, axis=1)
    if np.any(norms > 1.0 + NORM_TOLERANCE):
        worst = float(norms.max())
        raise DomainValidationError(f"point norm {worst!r} exceeds 1")


def _stack(points: Sequence["LabeledPoint"]) -> Tuple[np.ndarray, np.ndarray]:
    dims = {p.dim for p in points}
    if len(dims) > 1:
        first = points[0].dim
        other = next(d for d in dims if d != first)
        raise DimensionMismatchError(first, other, "point")
    features = np.vstack([p.x for p in points])
    labels = np.array([p.y for p in points], dtype=np.int64)
    return features, labels


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class LabeledPoint:
    """A feature vector in the unit ball together with a +/-1 label."""

    x: np.ndarray
    y: int

    def __post_init__(self):
        x = as_vector(self.x)
        if float(np.linalg.norm(x)) > 1.0 + NORM_TOLERANCE:
            raise DomainValidationError(f"point norm {float(np.linalg.norm(x))!r} exceeds 1")
        if self.y not in (-1, 1):
            raise DomainValidationError(f"label must be -1 or +1, got {self.y!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", int(self.y))

    @property
    def dim(self) -> int:
        return int(self.x.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledPoint):
            return False
        return self.y == other.y and np.array_equal(self.x, other.x)


@dataclass(frozen=True, eq=False)
class Sample:
    """
    Ordered multiset of labeled points, stored column-wise.

    ``features`` is n x d and ``labels`` holds n entries in {-1, +1}. Drawing
    (x, y) ~ S means picking a row uniformly at random.
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64)
        if features.ndim != 2 or features.shape[0] == 0:
            raise EmptySampleError("a sample needs at least one point")
        if labels.shape != (features.shape[0],):
            raise DomainValidationError("one label per point is required")
        _check_labels(labels)
        _check_ball(features)
        object.__setattr__(self, "features", _freeze(features))
        object.__setattr__(self, "labels", _freeze(labels))

    @classmethod
    def from_points(cls, points: Iterable[LabeledPoint]) -> "Sample":
        points = list(points)
        if not points:
            raise EmptySampleError("a sample needs at least one point")
        features, labels = _stack(points)
        return cls(features, labels)

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def points(self) -> List[LabeledPoint]:
        return list(iter(self))

    def __iter__(self) -> Iterator[LabeledPoint]:
        for x, y in zip(self.features, self.labels):
            yield LabeledPoint(x, int(y))

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """
    Finite distribution over labeled points with strictly positive weights.

    Exact expectations (and hence exact losses) are weighted sums over the
    support.
    """

    features: np.ndarray
    labels: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64)
        weights = np.array(self.weights, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] == 0:
            raise EmptySampleError("a distribution needs a nonempty support")
        m = features.shape[0]
        if labels.shape != (m,) or weights.shape != (m,):
            raise DomainValidationError("one label and one weight per support point is required")
        _check_labels(labels)
        _check_ball(features)
        if np.any(weights <= 0.0):
            raise DomainValidationError("all weights must be positive")
        total = float(np.sum(weights))
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise DomainValidationError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "features", _freeze(features))
        object.__setattr__(self, "labels", _freeze(labels))
        object.__setattr__(self, "weights", _freeze(weights))

    @classmethod
    def uniform(cls, points: Sequence[LabeledPoint]) -> "DiscreteDistribution":
        """Uniform distribution over the given points (duplicates keep multiplicity)."""
        points = list(points)
        if not points:
            raise EmptySampleError("a distribution needs a nonempty support")
        features, labels = _stack(points)
        return cls.uniform_arrays(features, labels)

    @classmethod
    def uniform_arrays(cls, features: ArrayLike, labels: ArrayLike) -> "DiscreteDistribution":
        features = np.asarray(features, dtype=np.float64)
        m = features.shape[0] if features.ndim == 2 else 0
        if m == 0:
            raise EmptySampleError("a distribution needs a nonempty support")
        return cls(features, labels, np.full(m, 1.0 / m))

    @classmethod
    def from_sample(cls, sample: Sample) -> "DiscreteDistribution":
        """The empirical distribution of a sample."""
        return cls.uniform_arrays(sample.features, sample.labels)

    @property
    def size(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def support(self) -> List[Tuple[LabeledPoint, float]]:
        return [
            (LabeledPoint(x, int(y)), float(p))
            for x, y, p in zip(self.features, self.labels, self.weights)
        ]

    def draw_indices(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Indices of n i.i.d. draws from the distribution."""
        return rng.choice(self.size, size=n, p=self.weights)

    def sample(self, n: int, rng: np.random.Generator) -> Sample:
        """Draw S ~ D^n."""
        if n < 1:
            raise EmptySampleError("cannot draw an empty sample")
        idx = self.draw_indices(n, rng)
        return Sample(self.features[idx], self.labels[idx])
