"""Shared fixtures."""

import os

os.environ.setdefault("MBL_ENV", "testing")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from application.services.learn import planted_margin_distribution  # noqa: E402
from infrastructure.parallel.trial_executor import TrialExecutor  # noqa: E402


@pytest.fixture
def rng():
    """A fixed generator for tests that draw their own inputs."""
    return np.random.default_rng(12345)


@pytest.fixture
def serial():
    """Single-threaded executor."""
    return TrialExecutor(1)


@pytest.fixture
def threaded():
    """Four-thread executor; results must match ``serial``."""
    return TrialExecutor(4)


@pytest.fixture
def planted():
    """Small separable distribution with planted margin 0.2 and its separator."""
    return planted_margin_distribution(d=10, support_size=60, margin=0.2, seed=7)
