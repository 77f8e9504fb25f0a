"""Unit vector value object for halfspace normals."""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from domain.errors import DimensionMismatchError, DomainValidationError

NORM_TOLERANCE = 1e-9

ArrayLike = Union[Sequence[float], np.ndarray]


def as_vector(values: ArrayLike) -> np.ndarray:
    """Return a read-only 1-D float64 copy of ``values``."""
    array = np.array(values, dtype=np.float64)
    if array.ndim != 1:
        raise DomainValidationError(f"expected a 1-D vector, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise DomainValidationError("vector entries must be finite")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class UnitVector:
    """
    Immutable hypothesis normal w on the unit sphere.

    The norm is checked once at construction; downstream code may treat the
    coordinates as exactly unit length.
    """

    coords: np.ndarray

    def __post_init__(self):
        """Validate the unit-norm invariant."""
        coords = as_vector(self.coords)
        if coords.size == 0:
            raise DomainValidationError("unit vector needs at least one coordinate")
        norm = float(np.linalg.norm(coords))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise DomainValidationError(f"vector norm {norm!r} is not 1 within {NORM_TOLERANCE}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_direction(cls, direction: ArrayLike) -> "UnitVector":
        """Normalise an arbitrary nonzero direction."""
        array = np.asarray(direction, dtype=np.float64)
        norm = float(np.linalg.norm(array))
        if norm == 0.0:
            raise DomainValidationError("cannot normalise the zero vector")
        return cls(array / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "UnitVector":
        """Standard basis vector e_index in dimension ``dim``."""
        if not 0 <= index < dim:
            raise DomainValidationError(f"basis index {index} outside [0, {dim})")
        coords = np.zeros(dim)
        coords[index] = 1.0
        return cls(coords)

    @property
    def dim(self) -> int:
        return int(self.coords.size)

    def dot(self, x: ArrayLike) -> float:
        """Inner product with a vector of the same dimension."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.coords.shape:
            raise DimensionMismatchError(self.dim, int(x.size))
        return float(self.coords @ x)

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnitVector):
            return False
        return np.array_equal(self.coords, other.coords)

    def __str__(self) -> str:
        return f"UnitVector(dim={self.dim})"
