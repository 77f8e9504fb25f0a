"""Value objects for the margin laboratory."""

from .bound_inputs import BoundInputs, BoundKind
from .grid import DiscretizationDraw, GridFamilyIndex, GridVector, grid_pitch, grid_value
from .labeled_data import DiscreteDistribution, LabeledPoint, Sample
from .lower_bound_config import LowerBoundConfig, WitnessSpec
from .monte_carlo_estimate import MonteCarloEstimate
from .unit_vector import UnitVector

__all__ = [
    "BoundInputs",
    "BoundKind",
    "DiscreteDistribution",
    "DiscretizationDraw",
    "GridFamilyIndex",
    "GridVector",
    "LabeledPoint",
    "LowerBoundConfig",
    "MonteCarloEstimate",
    "Sample",
    "UnitVector",
    "WitnessSpec",
    "grid_pitch",
    "grid_value",
]
