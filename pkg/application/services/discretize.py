"""
Random discretization of hypotheses.

A hypothesis w is projected with a k x d Gaussian matrix A (entries N(0, 1/k))
and every coordinate of Aw is rounded to one of its two neighbouring points on
the offset grid {(z + 1/2) / (10 sqrt(k))}, downwards iff the uniform offset
t_i is at most p(z_i). The rounding is unbiased: E_t[h] = Aw.

The margin y<h, Ax> only depends on alpha = y<w, x>, which gives a sampler
that never materialises A. ``sample_margins`` implements it; the direct
d-dimensional pipeline is kept as an oracle (``direct_margins``).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import comb

from domain.errors import DomainValidationError, EnumerationTooLargeError, PreconditionError
from domain.value_objects.grid import (
    DiscretizationDraw,
    GridFamilyIndex,
    GridVector,
    grid_pitch,
    grid_value,
)
from domain.value_objects.labeled_data import LabeledPoint
from domain.value_objects.monte_carlo_estimate import MonteCarloEstimate
from domain.value_objects.unit_vector import UnitVector
from infrastructure.logging.logger_factory import get_module_logger
from infrastructure.parallel.trial_executor import (
    DEFAULT_CHUNK_SIZE,
    TrialExecutor,
    chunk_sizes,
    default_executor,
)

logger = get_module_logger(__name__)

MAX_ENUMERATION_DIMENSION = 3

# Budget of float64 entries per batch of explicit projection matrices.
_DIRECT_BATCH_ENTRIES = 1 << 22

GEOMETRY_TOLERANCE = 1e-12

# Below this |z| the grid points (z + 1/2) pitch are strictly increasing floats
# and rounding brackets v exactly.
EXACT_INDEX_LIMIT = 2.0**52
# Scaled values are clamped here so z + 1 stays finite.
_INDEX_LIMIT = 1e300
_BRACKET_PASSES = 4


class PreservationMode(str, Enum):
    """Sampler used by the margin-preservation estimate."""
    DIMENSION_FREE = "dimension_free"
    DIRECT = "direct"


def sample_draw(k: int, d: int, rng: np.random.Generator) -> DiscretizationDraw:
    """One (A, t): A has i.i.d. N(0, 1/k) entries, t is uniform on [0, 1]^k."""
    if k < 1 or d < 1:
        raise DomainValidationError(f"need k >= 1 and d >= 1, got k={k}, d={d}")
    matrix = rng.standard_normal((k, d)) / math.sqrt(k)
    offsets = rng.random(k)
    return DiscretizationDraw(matrix, offsets)


def rounding_probabilities(values: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorised ``rounding_probability``.

    Returns the integer indices z with grid(z) <= v < grid(z + 1) and the
    probabilities p with v = p grid(z) + (1 - p) grid(z + 1). Indices are
    int64 while every |z| is below ``EXACT_INDEX_LIMIT`` and integral float64
    beyond that.
    Where grid(z) and grid(z + 1) round to the same float, v sits on the grid
    at float resolution and p = 1.
    """
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise PreconditionError("rounding_probability", "values must be finite")
    pitch = grid_pitch(k)
    with np.errstate(over="ignore"):
        scaled = values / pitch - 0.5
    z = np.floor(np.clip(scaled, -_INDEX_LIMIT, _INDEX_LIMIT))

    # floor() of the scaled value can be a few indices off near grid points
    for _ in range(_BRACKET_PASSES):
        below = grid_value(z, k) > values
        above = grid_value(z + 1, k) <= values
        if not (np.any(below) or np.any(above)):
            break
        z = np.where(below, z - 1, np.where(above, z + 1, z))

    lo = grid_value(z, k)
    hi = grid_value(z + 1, k)
    span = hi - lo
    resolved = span > 0.0
    p = np.where(resolved, (hi - values) / np.where(resolved, span, 1.0), 1.0)
    p = np.clip(p, 0.0, 1.0)

    if np.all(np.abs(z) < EXACT_INDEX_LIMIT):
        z = z.astype(np.int64)
    return z, p


def rounding_probability(value: float, k: int) -> Tuple[int, float]:
    """The grid index below ``value`` and the probability of rounding down to it."""
    z, p = rounding_probabilities(np.array([value]), k)
    return int(z[0]), float(p[0])


def snap_values(values: np.ndarray, offsets: np.ndarray, k: int) -> np.ndarray:
    """Grid indices after rounding: down iff offset <= p."""
    z, p = rounding_probabilities(values, k)
    return np.where(np.asarray(offsets) <= p, z, z + 1)


def snap(draw: DiscretizationDraw, w: UnitVector) -> GridVector:
    """h_{A,t}(w) as a grid vector."""
    if w.dim != draw.d:
        raise DomainValidationError(f"hypothesis has dimension {w.dim}, draw expects {draw.d}")
    return GridVector(snap_values(draw.project(w.coords), draw.offsets, draw.k))


def grid_level(g: GridVector) -> GridFamilyIndex:
    """Smallest i >= 0 with ||g|| <= 2^i * 4."""
    level = 0
    while not GridFamilyIndex(level).contains(g):
        level += 1
    return GridFamilyIndex(level)


def _isqrt_array(values: np.ndarray) -> np.ndarray:
    """Exact floor(sqrt(v)) for nonnegative int64 values below 2^52."""
    roots = np.floor(np.sqrt(values.astype(np.float64))).astype(np.int64)
    roots = np.where(roots * roots > values, roots - 1, roots)
    roots = np.where((roots + 1) * (roots + 1) <= values, roots + 1, roots)
    return roots


def _odd_count(budget: np.ndarray) -> np.ndarray:
    """Number of odd integers o with o^2 <= budget (0 where budget < 1)."""
    budget = np.asarray(budget, dtype=np.int64)
    roots = _isqrt_array(np.maximum(budget, 0))
    return 2 * ((roots + 1) // 2)


def _odd_values(budget: int) -> np.ndarray:
    root = math.isqrt(budget)
    top = root if root % 2 == 1 else root - 1
    if top < 1:
        return np.zeros(0, dtype=np.int64)
    return np.arange(-top, top + 1, 2, dtype=np.int64)


def _enumerate_grid(k: int, level: int) -> int:
    # g in G_level  <=>  sum (2 z_i + 1)^2 <= 6400 k 4^level
    budget = 6400 * k * 4 ** level
    if k == 1:
        return int(_odd_count(np.array([budget]))[0])
    first = _odd_values(budget)
    rest = budget - first * first
    if k == 2:
        return int(np.sum(_odd_count(rest)))
    total = 0
    for remaining in rest:
        second = _odd_values(int(remaining))
        total += int(np.sum(_odd_count(remaining - second * second)))
    return total


def net_size_bound(k: int, level: int) -> int:
    """
    2^k C(k + T, T) with T = (5 * 2^(level+3) + 1) k.

    Counts sign patterns times nonnegative integer vectors with coordinate
    sum at most T, which covers every index vector of G_level.
    """
    if k < 1 or level < 0:
        raise DomainValidationError(f"need k >= 1 and level >= 0, got k={k}, level={level}")
    t = (5 * 2 ** (level + 3) + 1) * k
    return 2 ** k * int(comb(k + t, t, exact=True))


def _at_most_power_of_two(value: int, exponent: int) -> bool:
    bits = value.bit_length()
    if bits <= exponent:
        return True
    return bits == exponent + 1 and value == 1 << exponent


@dataclass(frozen=True)
class GridCount:
    """Size of the grid family G_level in dimension k, exact where enumerable."""

    k: int
    level: int
    count: Optional[int]
    net_bound: int

    @property
    def bound_exponent(self) -> int:
        """E in the headline bound |G_level| <= 2^E, E = 2^(level+7) k."""
        return 2 ** (self.level + 7) * self.k

    @property
    def intermediate_exponent(self) -> int:
        return (5 * 2 ** (self.level + 3) + 3) * self.k

    @property
    def within_bound(self) -> Optional[bool]:
        if self.count is None:
            return None
        return _at_most_power_of_two(self.count, self.bound_exponent)

    @property
    def net_within_bound(self) -> bool:
        return _at_most_power_of_two(
            self.net_bound, self.intermediate_exponent
        ) and self.intermediate_exponent <= self.bound_exponent


def grid_count(k: int, level: int, enumerate_points: bool = True) -> GridCount:
    """
    Count the lattice points of G_level.

    Raises:
        EnumerationTooLargeError: If exact enumeration is requested for k > 3
    """
    if k < 1 or level < 0:
        raise DomainValidationError(f"need k >= 1 and level >= 0, got k={k}, level={level}")
    count = None
    if enumerate_points:
        if k > MAX_ENUMERATION_DIMENSION:
            raise EnumerationTooLargeError(
                "grid_count", f"exact enumeration needs k <= {MAX_ENUMERATION_DIMENSION}, got {k}"
            )
        count = _enumerate_grid(k, level)
    return GridCount(k, level, count, net_size_bound(k, level))


def _check_alpha(alpha: float) -> None:
    if not -1.0 <= alpha <= 1.0:
        raise PreconditionError("sample_margin", f"|alpha| <= 1 required, got {alpha!r}")


@dataclass(frozen=True, eq=False)
class CoupledDraws:
    """
    Raw draws of the dimension-free sampler, reusable for any alpha.

    X = M / sqrt(k) plays the role of Aw and Z = alpha X + Y, Y independent
    N(0, (1 - alpha^2)/k), the role of yAx. X is snapped to X' with fresh
    offsets, so <X', Z> = alpha <X', X> + sqrt((1 - alpha^2)/k) <X', N> and
    only the two inner products need to be kept.
    """

    k: int
    snapped_x: np.ndarray
    snapped_noise: np.ndarray

    @classmethod
    def draw(cls, k: int, size: int, rng: np.random.Generator) -> "CoupledDraws":
        normals = rng.standard_normal((size, k))
        independent = rng.standard_normal((size, k))
        offsets = rng.random((size, k))
        x = normals / math.sqrt(k)
        snapped = grid_value(snap_values(x, offsets, k), k)
        return cls(
            k,
            np.einsum("ij,ij->i", snapped, x),
            np.einsum("ij,ij->i", snapped, independent),
        )

    @property
    def size(self) -> int:
        return int(self.snapped_x.size)

    def margins(self, alpha: float) -> np.ndarray:
        """y<h_{A,t}(w), Ax> for every draw, at y<w, x> = alpha."""
        _check_alpha(alpha)
        scale = math.sqrt(max(1.0 - alpha * alpha, 0.0) / self.k)
        return alpha * self.snapped_x + scale * self.snapped_noise


def sample_margins(alpha: float, k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """
    ``size`` draws of y<h_{A,t}(w), Ax> for any (w, x, y) with y<w, x> = alpha.

    The raw draws do not depend on alpha, so calls with equal generators are
    coupled across alpha.
    """
    _check_alpha(alpha)
    return CoupledDraws.draw(k, size, rng).margins(alpha)


def sample_margin(alpha: float, k: int, rng: np.random.Generator) -> float:
    return float(sample_margins(alpha, k, 1, rng)[0])


def sample_snapped_pairs(
    k: int, size: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Draws of X ~ N(0, I/k) with their snapped images X'."""
    x = rng.standard_normal((size, k)) / math.sqrt(k)
    offsets = rng.random((size, k))
    return x, grid_value(snap_values(x, offsets, k), k)


def planted_pair(
    alpha: float, d: int, label: int, rng: np.random.Generator
) -> Tuple[UnitVector, LabeledPoint]:
    """A random unit w and unit-norm labeled x in R^d with y<w, x> = alpha."""
    _check_alpha(alpha)
    if d < 2:
        raise DomainValidationError(f"planted pairs need d >= 2, got {d}")
    w = UnitVector.from_direction(rng.standard_normal(d))
    u = rng.standard_normal(d)
    u -= (u @ w.coords) * w.coords
    u /= np.linalg.norm(u)
    x = label * (alpha * w.coords + math.sqrt(max(1.0 - alpha * alpha, 0.0)) * u)
    norm = float(np.linalg.norm(x))
    if norm > 1.0:
        x = x / norm
    return w, LabeledPoint(x, label)


def direct_margins(
    w: UnitVector, point: LabeledPoint, k: int, size: int, rng: np.random.Generator
) -> np.ndarray:
    """``size`` draws of y<h_{A,t}(w), Ax> through explicit k x d matrices."""
    if w.dim != point.dim:
        raise DomainValidationError("hypothesis and point dimensions differ")
    d = w.dim
    batch = max(1, _DIRECT_BATCH_ENTRIES // (k * d))
    out = np.empty(size)
    for start in range(0, size, batch):
        b = min(batch, size - start)
        matrices = rng.standard_normal((b, k, d)) / math.sqrt(k)
        offsets = rng.random((b, k))
        projected_w = matrices @ w.coords
        projected_x = matrices @ point.x
        snapped = grid_value(snap_values(projected_w, offsets, k), k)
        out[start:start + b] = point.y * np.einsum("ij,ij->i", snapped, projected_x)
    return out


def estimate_preservation(
    alpha: float,
    gamma: float,
    k: int,
    trials: int,
    seed: int,
    mode: PreservationMode = PreservationMode.DIMENSION_FREE,
    d: int = 50,
    executor: Optional[TrialExecutor] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MonteCarloEstimate:
    """
    Monte Carlo estimate of Pr[|y<h, Ax> - alpha| > gamma].

    ``mode`` selects the dimension-free sampler or the explicit pipeline on a
    planted pair in dimension ``d``.
    """
    _check_alpha(alpha)
    if not 0.0 < gamma <= 1.0:
        raise PreconditionError("estimate_preservation", f"gamma={gamma!r} outside (0, 1]")
    if trials < 1:
        raise PreconditionError("estimate_preservation", "trials must be at least 1")
    executor = executor or default_executor()

    if mode == PreservationMode.DIMENSION_FREE:
        def draw(size: int, rng: np.random.Generator) -> np.ndarray:
            return sample_margins(alpha, k, size, rng)
    elif mode == PreservationMode.DIRECT:
        w, point = planted_pair(alpha, d, 1, np.random.default_rng(seed))

        def draw(size: int, rng: np.random.Generator) -> np.ndarray:
            return direct_margins(w, point, k, size, rng)
    else:
        raise DomainValidationError(f"unknown preservation mode '{mode}'")

    def count(size: int, rng: np.random.Generator) -> int:
        return int(np.count_nonzero(np.abs(draw(size, rng) - alpha) > gamma))

    hits = sum(executor.map_chunks(count, seed, chunk_sizes(trials, chunk_size)))
    estimate = MonteCarloEstimate.from_indicators(hits, trials)
    logger.debug("Margin preservation estimated", {
        "alpha": alpha,
        "gamma": gamma,
        "k": k,
        "mode": PreservationMode(mode).value,
        "estimate": estimate.value,
    })
    return estimate


def rounding_geometry_violations(x: np.ndarray, snapped: np.ndarray) -> Dict[str, int]:
    """
    Count rows (X, X') violating the deterministic facts about snapping.

    ``||X'|| >= 1/20``, ``||X' - X|| <= 1/10``, ``||X||^2 <= 4/3 => ||X'||^2 < 2``
    and ``||X||^2 >= 9/10 => (8/9)||X||^2 <= <X, X'> <= (10/9)||X||^2``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    snapped = np.atleast_2d(np.asarray(snapped, dtype=np.float64))
    tol = GEOMETRY_TOLERANCE
    x_sq = np.einsum("ij,ij->i", x, x)
    s_sq = np.einsum("ij,ij->i", snapped, snapped)
    inner = np.einsum("ij,ij->i", x, snapped)
    diff = snapped - x
    diff_sq = np.einsum("ij,ij->i", diff, diff)

    short = s_sq < 1.0 / 400.0 - tol
    far = diff_sq > 1.0 / 100.0 + tol
    small = x_sq <= 4.0 / 3.0
    inflated = small & (s_sq >= 2.0)
    large = x_sq >= 0.9
    skewed = large & (
        (inner < (8.0 / 9.0) * x_sq - tol) | (inner > (10.0 / 9.0) * x_sq + tol)
    )
    return {
        "snapped_norm_below_1/20": int(np.count_nonzero(short)),
        "snap_error_above_1/10": int(np.count_nonzero(far)),
        "snapped_norm_sq_not_below_2": int(np.count_nonzero(inflated)),
        "inner_product_outside_8/9_10/9": int(np.count_nonzero(skewed)),
    }


def discretized_margins(
    draw: DiscretizationDraw, w: UnitVector, features: np.ndarray, labels: np.ndarray
) -> np.ndarray:
    """y_j <h_{A,t}(w), A x_j> for every row of ``features``."""
    h = snap(draw, w).realize()
    return np.asarray(labels, dtype=np.float64) * (draw.project(features) @ h)
