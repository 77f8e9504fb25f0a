"""
Tests for the numerical verification checks.

Every check runs once at a small size where it must pass, and where a
deliberately wrong constant or rule exists, once more where it must fail.
"""

import math

import numpy as np
import pytest

from application.services.margins import lift_distribution, lift_hypothesis
from application.services.verify import (
    CONSTANTS,
    check_bernstein_margin,
    check_chi_square_tail,
    check_dist_determinism,
    check_lipschitz,
    check_loss_decomposition,
    check_margin_preservation,
    check_monotonicity,
    check_p_in_unit,
    check_phirho_sandwich,
    check_rounding_geometry,
    check_unbiased_rounding,
    estimate_phi,
    estimate_rho,
    lipschitz_budget,
    surrogate_estimates,
    tail_bound,
)
from domain.entities.check_report import CheckStatus
from domain.errors import PreconditionError


@pytest.fixture
def lifted(planted):
    """The planted distribution lifted onto the unit sphere, with its separator."""
    dist, w = planted
    return lift_distribution(dist), lift_hypothesis(w)


class TestLedger:
    """Test cases for the bound constants and budgets."""

    def test_constants(self):
        """Test the recorded constant values."""
        assert CONSTANTS["tail"].value == 800.0
        assert CONSTANTS["dimension"].value == 72.0
        assert CONSTANTS["chi_square"].value == 8.0
        assert CONSTANTS["bernstein"].value == 8.0
        assert all(entry.role for entry in CONSTANTS.values())

    def test_tail_bound(self):
        """Test c exp(-gamma^2 k / c)."""
        assert tail_bound(0.25, 64, 1.0) == pytest.approx(math.exp(-4.0))

    def test_lipschitz_budget(self):
        """Test the budget factor sqrt(k) + 1/gamma_i."""
        assert lipschitz_budget(0.5, 16, 1.0) == pytest.approx(math.exp(-4.0) * 6.0)


class TestSurrogates:
    """Test cases for phi and rho estimates."""

    def test_flat_branches_are_exact(self):
        """Test phi = 0 above gamma_i and rho = 0 at or below 0."""
        assert estimate_phi(0.3, 0.1, 64, 100, seed=0).value == 0.0
        assert estimate_rho(-0.2, 0.1, 64, 100, seed=0).value == 0.0
        assert estimate_rho(0.0, 0.1, 64, 100, seed=0).stderr == 0.0

    def test_interpolation_branch(self):
        """Test phi(gamma_i / 2) = phi(0) / 2 under a shared seed."""
        half = estimate_phi(0.05, 0.1, 64, 5000, seed=3)
        anchor = estimate_phi(0.0, 0.1, 64, 5000, seed=3)

        assert half.value == pytest.approx(0.5 * anchor.value)
        assert 0.0 < anchor.value < 1.0

    def test_shared_pass(self):
        """Test that one call returns an estimate per alpha, in order."""
        values = surrogate_estimates([-0.2, 0.05, 0.5], 0.1, 32, 2000, seed=1, which="rho")

        assert values[0].value == 0.0
        assert values[2].value < values[1].value
        assert len(values) == 3

    def test_alpha_outside_lifted_range(self):
        """Test |alpha| <= c_gamma."""
        with pytest.raises(PreconditionError):
            estimate_phi(-0.9, 0.1, 16, 10, seed=0)

    def test_unknown_surrogate(self):
        """Test the surrogate selector."""
        with pytest.raises(ValueError):
            surrogate_estimates([0.0], 0.1, 16, 10, seed=0, which="psi")


class TestExactChecks:
    """Test cases for the deterministic checks."""

    def test_p_in_unit(self, serial):
        """Test that rounding probabilities are valid everywhere sampled."""
        report = check_p_in_unit(trials=20_000, seed=0, executor=serial)

        assert report.name == "p-in-unit"
        assert report.status is CheckStatus.PASS
        assert report.estimates["violations"] == 0
        assert report.estimates["grid_point_violations"] == 0

    def test_rounding_geometry(self, serial, threaded):
        """Test the snapping facts and executor independence."""
        a = check_rounding_geometry(k=64, samples=20_000, seed=4, executor=serial)
        b = check_rounding_geometry(k=64, samples=20_000, seed=4, executor=threaded)

        assert a.status is CheckStatus.PASS
        assert a.estimates == b.estimates
        assert len(a.estimates) == 4

    def test_loss_decomposition(self, planted, rng, serial):
        """Test the per-draw identity on a distribution and a sample."""
        dist, w = planted
        report = check_loss_decomposition(
            dist, w, 0.1, 16, 50, seed=2, sample=dist.sample(40, rng), gamma=0.15,
            executor=serial,
        )

        assert report.status is CheckStatus.PASS
        assert report.estimates["max_residual"] <= 1e-12


class TestStatisticalChecks:
    """Test cases for the Monte Carlo checks and their inversions."""

    def test_dist_determinism(self, serial):
        """Test that explicit pipelines match the dimension-free sampler."""
        report = check_dist_determinism(
            alpha=0.3, k=16, samples=5000, pairs=1, seed=0, dims=(10,), executor=serial
        )

        assert report.status is CheckStatus.PASS
        assert list(report.estimates) == ["ks_pvalue_pair0"]

    def test_dist_determinism_detects_wrong_margin(self, serial):
        """Test that pipelines at a different margin are rejected."""
        report = check_dist_determinism(
            alpha=0.0, k=16, samples=5000, pairs=1, seed=0, alt_alpha=0.5, dims=(10,),
            executor=serial,
        )

        assert report.status is CheckStatus.FAIL

    def test_monotonicity(self, serial):
        """Test q nondecreasing on [0, gamma_i], and the reversed claim failing."""
        passing = check_monotonicity(k=512, samples=20_000, seed=0, executor=serial)
        failing = check_monotonicity(
            k=512, samples=20_000, seed=0, expect_increasing=False, executor=serial
        )

        assert passing.status is CheckStatus.PASS
        assert failing.status is CheckStatus.FAIL
        assert list(passing.estimates)[0] == "q(0)"

    def test_monotonicity_preconditions(self):
        """Test alpha ordering and range."""
        with pytest.raises(PreconditionError):
            check_monotonicity(alphas=(0.05, 0.0), samples=10)
        with pytest.raises(PreconditionError):
            check_monotonicity(alphas=(0.0, 0.2), gamma_i=0.1, samples=10)

    def test_lipschitz(self, serial):
        """Test slopes well inside the budget."""
        report = check_lipschitz(
            gamma_i=0.3, k=600, h=0.02, samples=8192, seed=0, grid_points=3, executor=serial
        )

        assert report.status is CheckStatus.PASS
        assert report.estimates["phi_flat_slope"] == 0.0
        assert report.estimates["rho_flat_slope"] == 0.0
        assert report.stderrs["phi_flat_slope"] == 0.0
        assert report.estimates["slope_noise"] < 0.1 * report.threshold

    def test_lipschitz_inconclusive_with_tiny_step(self, serial):
        """Test that a step too small for the sample size is reported as inconclusive."""
        report = check_lipschitz(
            gamma_i=0.6, k=139, h=1e-8, samples=100_000, seed=0, grid_points=1, executor=serial
        )

        assert report.status is CheckStatus.INCONCLUSIVE

    def test_lipschitz_dimension_precondition(self):
        """Test k >= 72 ln 2 / gamma_i^2."""
        with pytest.raises(PreconditionError):
            check_lipschitz(gamma_i=0.2, k=100, samples=10)

    def test_chi_square_tail(self, serial):
        """Test the tail bound holds, and fails with a constant too small."""
        passing = check_chi_square_tail(trials=20_000, seed=0, executor=serial)
        failing = check_chi_square_tail(
            k=10, x=0.9, trials=20_000, seed=0, constant=0.5, executor=serial
        )

        assert passing.status is CheckStatus.PASS
        assert failing.status is CheckStatus.FAIL

    def test_bernstein_margin(self, planted, serial):
        """Test concentration of the projected margin loss, and a broken deviation."""
        dist, w = planted
        passing = check_bernstein_margin(
            dist, w, 0.1, 200, 0.1, 2000, seed=0, executor=serial
        )
        failing = check_bernstein_margin(
            dist, w, 0.6, 200, 0.1, 2000, seed=0, constant=1e-6, executor=serial
        )

        assert passing.status is CheckStatus.PASS
        assert failing.status is CheckStatus.FAIL
        assert 0.0 <= passing.estimates["projected_margin_loss"] <= 1.0

    def test_phirho_sandwich(self, lifted, rng, serial):
        """Test all four inequalities, and a scaled event cut breaking them."""
        dist, w = lifted
        sample = dist.sample(60, rng)
        passing = check_phirho_sandwich(
            dist, sample, w, 0.1, 0.15, 64, 20_000, seed=0, draws=300, executor=serial
        )
        failing = check_phirho_sandwich(
            dist, sample, w, 0.1, 0.15, 64, 20_000, seed=0, draws=300, event_scale=10.0,
            executor=serial,
        )

        assert passing.status is CheckStatus.PASS
        assert failing.status is CheckStatus.FAIL
        assert [key for key in passing.estimates][:2] == ["lhs1", "rhs1"]

    def test_phirho_sandwich_margin_order(self, lifted, rng):
        """Test gamma in (gamma_i, 2 gamma_i]."""
        dist, w = lifted
        with pytest.raises(PreconditionError):
            check_phirho_sandwich(dist, dist.sample(5, rng), w, 0.1, 0.3, 16, 10, seed=0)

    def test_unbiased_rounding(self, serial):
        """Test unbiasedness, and a shifted rounding rule failing."""
        passing = check_unbiased_rounding(k=16, d=20, trials=20_000, seed=0, executor=serial)
        failing = check_unbiased_rounding(
            k=16, d=20, trials=20_000, seed=0, offset_shift=0.1, executor=serial
        )

        assert passing.status is CheckStatus.PASS
        assert failing.status is CheckStatus.FAIL
        assert passing.threshold > 3.0

    def test_margin_preservation(self, serial):
        """Test decay in k under the ledger constant and failure with c = 1."""
        passing = check_margin_preservation(ks=(16, 32), trials=20_000, seed=0, executor=serial)
        failing = check_margin_preservation(
            ks=(64,), trials=20_000, seed=0, constant=1.0, executor=serial
        )

        assert passing.status is CheckStatus.PASS
        assert passing.estimates["failure(k=32)"] < passing.estimates["failure(k=16)"]
        assert failing.status is CheckStatus.FAIL
        assert failing.estimates["bound(k=64)"] == pytest.approx(math.exp(-4.0))

    def test_reports_are_reproducible(self, serial, threaded):
        """Test identical estimates under different thread counts."""
        a = check_margin_preservation(ks=(32,), trials=10_000, seed=5, executor=serial)
        b = check_margin_preservation(ks=(32,), trials=10_000, seed=5, executor=threaded)

        assert a.estimates == b.estimates
        assert np.isfinite(a.estimates["failure(k=32)"])


@pytest.mark.slow
class TestFullSizeChecks:
    """The checks at their documented acceptance sizes."""

    def test_p_in_unit_million_inputs(self, threaded):
        """Test zero violations over 10^6 rounding inputs."""
        report = check_p_in_unit(trials=1_000_000, seed=0, executor=threaded)

        assert report.status is CheckStatus.PASS
        assert report.estimates["violations"] == 0

    def test_unbiased_rounding(self, threaded):
        """Test unbiasedness at 10^5 offset draws."""
        report = check_unbiased_rounding(k=64, d=50, trials=100_000, seed=0, executor=threaded)

        assert report.status is CheckStatus.PASS

    def test_margin_preservation(self, threaded):
        """Test decay over k in {64, 128, 256, 512} at gamma = 0.25."""
        report = check_margin_preservation(
            alpha=0.0, gamma=0.25, ks=(64, 128, 256, 512), trials=100_000, seed=0,
            executor=threaded,
        )

        assert report.status is CheckStatus.PASS

    def test_monotonicity_k512(self, threaded):
        """Test q nondecreasing over the 5-point grid at k = 512, gamma_i = 0.1."""
        report = check_monotonicity(
            k=512, gamma_i=0.1, alphas=(0.0, 0.025, 0.05, 0.075, 0.1), samples=100_000,
            seed=0, executor=threaded,
        )

        assert report.status is CheckStatus.PASS

    def test_lipschitz_k4096(self, threaded):
        """Test every branch slope within the budget at k = 4096, gamma_i = 0.2."""
        report = check_lipschitz(gamma_i=0.2, k=4096, seed=0, executor=threaded)

        assert report.status is CheckStatus.PASS
        assert report.estimates["phi_flat_slope"] == 0.0
        assert report.estimates["rho_flat_slope"] == 0.0
