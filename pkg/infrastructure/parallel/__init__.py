"""Reproducible parallel execution of Monte Carlo trials."""

from .trial_executor import (
    DEFAULT_CHUNK_SIZE,
    TrialExecutor,
    chunk_sizes,
    default_executor,
    derive_seeds,
    resolve_threads,
    set_default_executor,
    trial_generator,
)

__all__ = [
    "DEFAULT_CHUNK_SIZE",
    "TrialExecutor",
    "chunk_sizes",
    "default_executor",
    "derive_seeds",
    "resolve_threads",
    "set_default_executor",
    "trial_generator",
]
