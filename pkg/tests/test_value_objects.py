"""Tests for domain value objects and entities."""

import math

import numpy as np
import pytest

from domain.entities.check_report import CheckReport, CheckStatus
from domain.errors import (
    DimensionMismatchError,
    DomainValidationError,
    EmptySampleError,
    InvalidLowerBoundConfigError,
    UnknownCheckError,
)
from domain.value_objects.bound_inputs import BoundInputs
from domain.value_objects.grid import (
    DiscretizationDraw,
    GridFamilyIndex,
    GridVector,
    grid_pitch,
    grid_value,
)
from domain.value_objects.labeled_data import DiscreteDistribution, LabeledPoint, Sample
from domain.value_objects.lower_bound_config import LowerBoundConfig, WitnessSpec
from domain.value_objects.monte_carlo_estimate import MonteCarloEstimate
from domain.value_objects.unit_vector import UnitVector


class TestUnitVector:
    """Test cases for UnitVector."""

    def test_from_direction_normalises(self):
        """Test that an arbitrary direction is scaled to unit norm."""
        w = UnitVector.from_direction([3.0, 4.0])

        assert w.coords == pytest.approx([0.6, 0.8])
        assert w.dim == 2

    def test_rejects_non_unit(self):
        """Test that a vector off the sphere is rejected."""
        with pytest.raises(DomainValidationError):
            UnitVector(np.array([1.0, 1.0]))

    def test_rejects_zero_direction(self):
        """Test that the zero vector cannot be normalised."""
        with pytest.raises(DomainValidationError):
            UnitVector.from_direction([0.0, 0.0, 0.0])

    def test_coords_are_read_only(self):
        """Test immutability of the coordinates."""
        w = UnitVector.basis(3, 1)
        with pytest.raises(ValueError):
            w.coords[0] = 1.0

    def test_dot_dimension_mismatch(self):
        """Test that dot checks dimensions."""
        with pytest.raises(DimensionMismatchError):
            UnitVector.basis(3, 0).dot([1.0, 0.0])


class TestSampleAndDistribution:
    """Test cases for labeled data containers."""

    def test_point_outside_ball_rejected(self):
        """Test that ||x|| > 1 is rejected."""
        with pytest.raises(DomainValidationError):
            LabeledPoint(np.array([1.0, 1.0]), 1)

    def test_label_must_be_sign(self):
        """Test that labels are restricted to -1 and +1."""
        with pytest.raises(DomainValidationError):
            LabeledPoint(np.array([0.5, 0.0]), 0)

    def test_empty_sample_rejected(self):
        """Test that a sample needs a point."""
        with pytest.raises(EmptySampleError):
            Sample.from_points([])

    def test_mixed_dimensions_rejected(self):
        """Test that points must share a dimension."""
        with pytest.raises(DimensionMismatchError):
            Sample.from_points([LabeledPoint([0.1, 0.2], 1), LabeledPoint([0.1], -1)])

    def test_weights_must_sum_to_one(self):
        """Test the normalisation invariant of distributions."""
        with pytest.raises(DomainValidationError):
            DiscreteDistribution(np.eye(2) * 0.5, [1, -1], [0.5, 0.6])

    def test_uniform_keeps_duplicates(self):
        """Test that duplicate support points keep their multiplicity."""
        p = LabeledPoint([0.5, 0.0], 1)
        q = LabeledPoint([0.0, 0.5], -1)
        dist = DiscreteDistribution.uniform([p, p, q])

        assert dist.size == 3
        assert dist.weights == pytest.approx([1 / 3] * 3)

    def test_sample_is_deterministic_under_seed(self, planted):
        """Test that S ~ D^n only depends on the generator state."""
        dist, _ = planted
        a = dist.sample(25, np.random.default_rng(3))
        b = dist.sample(25, np.random.default_rng(3))

        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)
        assert a.n == 25


class TestBoundInputs:
    """Test cases for BoundInputs."""

    def test_scaled_n(self):
        """Test gamma^2 n."""
        assert BoundInputs(gamma=0.1, n=100, delta=0.1).scaled_n == pytest.approx(1.0)

    @pytest.mark.parametrize("kwargs", [
        {"gamma": 0.0, "n": 10, "delta": 0.1},
        {"gamma": 1.5, "n": 10, "delta": 0.1},
        {"gamma": 0.1, "n": 0.5, "delta": 0.1},
        {"gamma": 0.1, "n": 10, "delta": 0.0},
        {"gamma": 0.1, "n": 10, "delta": 0.1, "empirical_loss": 1.5},
        {"gamma": 0.1, "n": 10, "delta": 0.1, "c": 0.0},
        {"gamma": math.nan, "n": 10, "delta": 0.1},
    ])
    def test_invalid_ranges(self, kwargs):
        """Test that out-of-range inputs are rejected."""
        with pytest.raises(DomainValidationError):
            BoundInputs(**kwargs)

    def test_delta_and_gamma_admit_one(self):
        """Test the closed upper ends of the gamma and delta ranges."""
        b = BoundInputs(gamma=1.0, n=math.e, delta=1.0)
        assert b.with_changes(c=2.0).c == 2.0


class TestGrid:
    """Test cases for grid value objects."""

    def test_pitch_and_values(self):
        """Test the (z + 1/2) / (10 sqrt(k)) realisation."""
        assert grid_pitch(4) == pytest.approx(0.05)
        assert grid_value(0, 1) == pytest.approx(0.05)
        assert grid_value(-1, 1) == pytest.approx(-0.05)

    def test_grid_vector_requires_integers(self):
        """Test that fractional indices are rejected."""
        with pytest.raises(DomainValidationError):
            GridVector(np.array([0.5, 1.0]))

    def test_family_membership_uses_integer_norm(self):
        """Test the boundary of G_0 in dimension 1 (||g|| <= 4)."""
        # (z + 1/2) / 10 <= 4  <=>  z <= 39.5
        assert GridFamilyIndex(0).contains(GridVector(np.array([39])))
        assert not GridFamilyIndex(0).contains(GridVector(np.array([40])))
        assert GridFamilyIndex(0).contains(GridVector(np.array([-40])))
        assert GridFamilyIndex(1).radius == 8.0

    def test_draw_validates_offsets(self):
        """Test that offsets live in [0, 1]."""
        with pytest.raises(DomainValidationError):
            DiscretizationDraw(np.ones((2, 3)), np.array([0.5, 1.5]))

    def test_project_rows(self):
        """Test that project handles vectors and row stacks alike."""
        draw = DiscretizationDraw(np.arange(6.0).reshape(2, 3), np.array([0.1, 0.2]))
        x = np.array([1.0, 0.0, -1.0])

        assert np.array_equal(draw.project(x), draw.project(np.vstack([x, x]))[1])


class TestMonteCarloEstimate:
    """Test cases for MonteCarloEstimate."""

    def test_from_indicators(self):
        """Test the Bernoulli plug-in standard error."""
        est = MonteCarloEstimate.from_indicators(25, 100)

        assert est.value == 0.25
        assert est.stderr == pytest.approx(math.sqrt(0.25 * 0.75 / 100))
        assert est.upper(3.0) > est.value > est.lower(3.0)

    def test_scaled_keeps_nonnegative_stderr(self):
        """Test scaling by a negative factor."""
        est = MonteCarloEstimate(0.5, 0.1, 10).scaled(-2.0)

        assert est.value == -1.0
        assert est.stderr == pytest.approx(0.2)

    def test_exact_has_no_error(self):
        """Test deterministic values."""
        assert MonteCarloEstimate.exact(0.0) == MonteCarloEstimate(0.0, 0.0, 0)


class TestLowerBoundConfig:
    """Test cases for the lower-bound construction parameters."""

    def test_sizes_for_single_level(self):
        """Test k = 1, tau = 1/2: four points in dimension five."""
        cfg = LowerBoundConfig.of([0.5])

        assert cfg.level_sizes == (4,)
        assert cfg.m == 4
        assert cfg.dimension == 5

    def test_offsets_across_levels(self):
        """Test concatenated level offsets."""
        cfg = LowerBoundConfig.of([0.5, 0.5])

        assert cfg.level_sizes == (4, 8)
        assert cfg.level_offset(2) == 4

    def test_non_integral_size_rejected(self):
        """Test that 2^i / tau_i must be an integer."""
        with pytest.raises(InvalidLowerBoundConfigError):
            LowerBoundConfig.of([0.3])

    def test_witness_spec_size(self):
        """Test that T holds exactly 2^i points."""
        with pytest.raises(InvalidLowerBoundConfigError):
            WitnessSpec(1, (0,))
        with pytest.raises(InvalidLowerBoundConfigError):
            WitnessSpec(1, (0, 7)).validate_for(LowerBoundConfig.of([0.5]))


class TestCheckReport:
    """Test cases for CheckReport."""

    def test_status_from_outcome(self):
        """Test pass, fail and inconclusive statuses."""
        assert CheckReport.from_outcome("x", True, 1, 0).status is CheckStatus.PASS
        assert CheckReport.from_outcome("x", False, 1, 0).status is CheckStatus.FAIL
        assert CheckReport.from_outcome("x", True, 1, 0, True).status is CheckStatus.INCONCLUSIVE

    def test_rows_one_per_estimate(self):
        """Test flattening into CSV rows."""
        report = CheckReport.from_outcome("x", True, 10, 3, threshold=0.5)
        report.details.append("note")
        report.add_estimate("a", 1.0, 0.1)
        report.add_estimate("b", 2.0)
        rows = report.to_rows()

        assert [r["quantity"] for r in rows] == ["a", "b"]
        assert rows[0]["details"] == "note" and rows[1]["details"] == ""
        assert rows[0]["status"] == "pass"

    def test_rows_without_estimates(self):
        """Test that a report with no estimates still yields one row."""
        rows = CheckReport.from_outcome("x", False, 1, 0).to_rows()

        assert len(rows) == 1
        assert rows[0]["quantity"] is None

    def test_unknown_check_message(self):
        """Test the unknown-check error lists known names."""
        error = UnknownCheckError("nope", ["a", "b"])

        assert "nope" in str(error) and "a, b" in str(error)
