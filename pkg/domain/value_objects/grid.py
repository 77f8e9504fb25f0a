"""Discretization draws and offset-grid vectors in the projected space."""

import math
from dataclasses import dataclass

import numpy as np

from domain.errors import DomainValidationError

# Radius of the level-0 grid family ball.
BASE_RADIUS = 4.0


def grid_pitch(k: int) -> float:
    """Spacing (10 sqrt(k))^-1 of the offset grid in dimension k."""
    if k < 1:
        raise DomainValidationError(f"projection dimension k={k} must be at least 1")
    return 1.0 / (10.0 * math.sqrt(k))


def grid_value(z, k: int):
    """Realise integer index z as the grid coordinate (1/2 + z)(10 sqrt(k))^-1."""
    return (np.asarray(z, dtype=np.float64) + 0.5) * grid_pitch(k)


@dataclass(frozen=True, eq=False)
class DiscretizationDraw:
    """One realisation (A, t): a k x d Gaussian matrix and k offsets in [0, 1]."""

    matrix: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        offsets = np.array(self.offsets, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
            raise DomainValidationError(f"matrix must be k x d with k, d >= 1, got {matrix.shape}")
        if offsets.shape != (matrix.shape[0],):
            raise DomainValidationError("one offset per matrix row is required")
        if np.any(offsets < 0.0) or np.any(offsets > 1.0):
            raise DomainValidationError("offsets must lie in [0, 1]")
        matrix.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "offsets", offsets)

    @property
    def k(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def d(self) -> int:
        return int(self.matrix.shape[1])

    def project(self, vectors: np.ndarray) -> np.ndarray:
        """A x for a vector, or row-wise A x_j for an m x d array."""
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim == 1:
            return self.matrix @ vectors
        return vectors @ self.matrix.T


@dataclass(frozen=True, eq=False)
class GridVector:
    """
    Point of the offset grid, held as its integer index vector z.

    Coordinates are rematerialised from z on demand so grid membership never
    depends on accumulated float error.
    """

    z: np.ndarray

    def __post_init__(self):
        z = np.array(self.z)
        if z.ndim != 1 or z.size == 0:
            raise DomainValidationError("grid index vector must be 1-D and nonempty")
        if not np.issubdtype(z.dtype, np.integer):
            rounded = np.rint(z)
            if not np.array_equal(rounded, z):
                raise DomainValidationError("grid indices must be integers")
            z = rounded
        z = z.astype(np.int64)
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def k(self) -> int:
        return int(self.z.size)

    def realize(self) -> np.ndarray:
        return grid_value(self.z, self.k)

    def norm(self) -> float:
        return float(np.linalg.norm(self.realize()))

    def squared_index_norm(self) -> int:
        """sum_i (2 z_i + 1)^2, i.e. 400 k ||g||^2 computed in integers."""
        odd = 2 * self.z + 1
        return int(np.sum(odd * odd))

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridVector):
            return False
        return np.array_equal(self.z, other.z)


@dataclass(frozen=True)
class GridFamilyIndex:
    """Level i of the nested grid family: vectors of norm at most 2^i * 4."""

    level: int

    def __post_init__(self):
        if self.level < 0:
            raise DomainValidationError(f"grid level {self.level} must be nonnegative")

    @property
    def radius(self) -> float:
        return BASE_RADIUS * 2.0 ** self.level

    def contains(self, g: GridVector) -> bool:
        # ||g||^2 <= R^2  <=>  sum (2z+1)^2 <= 400 k R^2, with R^2 = 16 * 4^level
        return g.squared_index_norm() <= 6400 * g.k * 4 ** self.level
