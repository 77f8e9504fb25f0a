"""Tests for the margin perceptron and the learned-hypothesis gap experiment."""

import numpy as np
import pytest

from application.services.learn import (
    DEFAULT_QUANTILES,
    GAP_METRICS,
    GapRow,
    LearnerConfig,
    gap_vs_bounds,
    margin_perceptron,
    mistake_budget,
    planted_margin_distribution,
    summarize_gap_rows,
    train_margin_perceptron,
)
from application.services.margins import margin_loss_sample, margins_of
from domain.errors import DomainValidationError, PreconditionError
from domain.value_objects.bound_inputs import BoundKind
from domain.value_objects.labeled_data import Sample


class TestPlantedDistribution:
    """Test cases for the planted-margin generator."""

    def test_separable_with_planted_margin(self, planted):
        """Test y<w*, x> >= margin on every support point."""
        dist, w_star = planted
        margins = margins_of(w_star, dist.features, dist.labels)

        assert dist.size == 60
        assert np.all(margins >= 0.2 - 1e-9)
        assert np.linalg.norm(dist.features, axis=1) == pytest.approx(np.ones(60))

    def test_seeded(self):
        """Test that the generator only depends on its seed."""
        a, wa = planted_margin_distribution(5, 10, 0.3, seed=1)
        b, wb = planted_margin_distribution(5, 10, 0.3, seed=1)

        assert np.array_equal(a.features, b.features)
        assert wa == wb

    def test_noise_flips_labels(self):
        """Test that a positive noise rate breaks separability by w*."""
        dist, w_star = planted_margin_distribution(10, 400, 0.2, noise_rate=0.3, seed=2)

        assert np.any(margins_of(w_star, dist.features, dist.labels) < 0)

    @pytest.mark.parametrize("kwargs", [
        {"d": 1, "support_size": 10, "margin": 0.2},
        {"d": 5, "support_size": 10, "margin": 0.0},
        {"d": 5, "support_size": 10, "margin": 0.2, "noise_rate": 0.5},
    ])
    def test_invalid_arguments(self, kwargs):
        """Test argument validation."""
        with pytest.raises(DomainValidationError):
            planted_margin_distribution(**kwargs)


class TestMarginPerceptron:
    """Test cases for the margin perceptron."""

    def test_converges_on_separable_sample(self, planted, rng):
        """Test zero margin loss at half the planted margin."""
        dist, _ = planted
        sample = dist.sample(100, rng)
        result = train_margin_perceptron(sample, LearnerConfig(target_margin=0.1, max_epochs=2000))

        assert result.converged
        assert result.updates >= 1
        assert margin_loss_sample(result.w, sample, 0.1) == 0.0

    def test_wrapper_returns_unit_vector(self, planted, rng):
        """Test that margin_perceptron returns the normalised hypothesis."""
        dist, _ = planted
        w = margin_perceptron(dist.sample(50, rng), LearnerConfig(target_margin=0.05))

        assert float(np.linalg.norm(w.coords)) == pytest.approx(1.0)

    def test_epoch_budget(self, rng):
        """Test that a noisy sample returns within the epoch budget."""
        dist, _ = planted_margin_distribution(10, 200, 0.2, noise_rate=0.3, seed=4)
        result = train_margin_perceptron(
            dist.sample(200, rng), LearnerConfig(target_margin=0.1, max_epochs=3)
        )

        assert result.epochs <= 3
        assert float(np.linalg.norm(result.w.coords)) == pytest.approx(1.0)

    def test_contradictory_sample_returns_best_so_far(self):
        """Test that a sample ending every epoch at w = 0 still yields a unit hypothesis."""
        sample = Sample(np.array([[1.0, 0.0], [1.0, 0.0]]), np.array([1, -1]))
        result = train_margin_perceptron(sample, LearnerConfig(max_epochs=3))

        assert not result.converged
        assert result.epochs == 3
        assert abs(result.w.coords[0]) == pytest.approx(1.0)
        assert margin_loss_sample(result.w, sample, 0.0) == 0.5

    def test_updates_within_mistake_budget(self, planted, rng):
        """Test that training at half the planted margin stays within 4 / gamma*^2 updates."""
        dist, w_star = planted
        sample = dist.sample(200, rng)
        planted_margin = float(np.min(margins_of(w_star, sample.features, sample.labels)))
        result = train_margin_perceptron(
            sample, LearnerConfig(target_margin=planted_margin / 2, max_epochs=5000)
        )

        assert result.converged
        assert result.updates <= mistake_budget(planted_margin)

    def test_all_zero_features(self):
        """Test that a sample without a usable point is rejected."""
        sample = Sample(np.zeros((3, 2)), np.array([1, -1, 1]))
        with pytest.raises(PreconditionError):
            train_margin_perceptron(sample, LearnerConfig())

    def test_config_validation(self):
        """Test LearnerConfig ranges."""
        with pytest.raises(DomainValidationError):
            LearnerConfig(target_margin=-0.1)
        with pytest.raises(DomainValidationError):
            LearnerConfig(max_epochs=0)

    def test_mistake_budget(self):
        """Test 4 / gamma*^2."""
        assert mistake_budget(0.2) == pytest.approx(100.0)


class TestGapVsBounds:
    """Test cases for the gap experiment on learned hypotheses."""

    def test_rows_and_bounds(self, planted, serial):
        """Test one row per trial with every bound evaluated."""
        dist, _ = planted
        rows = gap_vs_bounds(dist, 200, 0.1, 0.1, 4, seed=11, executor=serial)

        assert [row.trial for row in rows] == [0, 1, 2, 3]
        for row in rows:
            assert set(row.bounds) == {kind.value for kind in BoundKind}
            assert row.gap == pytest.approx(row.true_loss - row.empirical_margin_loss)
            assert row.covered is True

    def test_thread_count_invariance(self, planted, serial, threaded):
        """Test identical rows under one and four threads."""
        dist, _ = planted
        a = gap_vs_bounds(dist, 80, 0.1, 0.1, 6, seed=3, executor=serial)
        b = gap_vs_bounds(dist, 80, 0.1, 0.1, 6, seed=3, executor=threaded)

        assert [r.to_dict() for r in a] == [r.to_dict() for r in b]

    def test_tight_blank_below_inverse_root_n(self, planted, serial):
        """Test that gamma^2 n < 1 leaves tight and coverage undefined."""
        dist, _ = planted
        row = gap_vs_bounds(dist, 50, 0.1, 0.1, 1, seed=0, executor=serial)[0]

        assert row.bounds[BoundKind.TIGHT.value] is None
        assert row.covered is None

    @pytest.mark.slow
    def test_tight_coverage_with_calibrated_constant(self, serial):
        """Test that tight with c = 4 covers the observed gap in at least 90% of trials."""
        dist, _ = planted_margin_distribution(d=10, support_size=200, margin=0.2, seed=21)
        rows = gap_vs_bounds(
            dist, 500, 0.2, 0.1, 200, seed=5,
            learner=LearnerConfig(target_margin=0.1, max_epochs=200),
            constants={BoundKind.TIGHT: 4.0}, executor=serial,
        )
        covered = [row.covered for row in rows]

        assert None not in covered
        assert sum(covered) >= 0.9 * len(rows)

    def test_rejects_empty_sample(self, planted):
        """Test n >= 1."""
        dist, _ = planted
        with pytest.raises(PreconditionError):
            gap_vs_bounds(dist, 0, 0.1, 0.1, 1, seed=0)


class TestSummary:
    """Test cases for quantile summaries."""

    def test_quantile_rows(self):
        """Test one row per quantile and the coverage rate."""
        rows = [
            GapRow(i, 0.0, 0.1 * i, 0.1 * i, {kind.value: 1.0 for kind in BoundKind})
            for i in range(5)
        ]
        summary = summarize_gap_rows(rows)

        assert list(summary.columns) == ["quantile"] + GAP_METRICS + ["coverage"]
        assert list(summary["quantile"]) == list(DEFAULT_QUANTILES)
        assert summary["true_loss"].iloc[2] == pytest.approx(0.2)
        assert summary["coverage"].iloc[0] == 1.0

    def test_empty(self):
        """Test that zero trials give a header-only frame."""
        summary = summarize_gap_rows([])

        assert summary.empty
        assert list(summary.columns) == ["quantile"] + GAP_METRICS + ["coverage"]
