"""Seeded, order-preserving execution of independent Monte Carlo trials."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np

from infrastructure.logging.logger_factory import get_module_logger

logger = get_module_logger(__name__)

T = TypeVar("T")

THREADS_ENVIRONMENT_VARIABLE = "MBL_THREADS"

# Default number of draws evaluated per task; results never depend on it
# beyond the fixed chunk layout chosen by the caller.
DEFAULT_CHUNK_SIZE = 8192


def trial_generator(seed: int, index: int) -> np.random.Generator:
    """Independent generator for trial ``index`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def chunk_sizes(total: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> List[int]:
    """Split ``total`` draws into fixed-size chunks (last one may be short)."""
    if total < 0:
        raise ValueError(f"total={total} must be nonnegative")
    if chunk_size < 1:
        raise ValueError(f"chunk_size={chunk_size} must be positive")
    full, rest = divmod(total, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def resolve_threads(cli_value: Optional[int] = None, env: Optional[dict] = None) -> int:
    """
    Worker count from the command line, else ``MBL_THREADS``, else the CPU count.

    Raises:
        ValueError: If the resolved value is not a positive integer
    """
    if cli_value is not None:
        threads = cli_value
    else:
        raw = (env if env is not None else os.environ).get(THREADS_ENVIRONMENT_VARIABLE)
        if raw is None or raw.strip() == "":
            return max(1, os.cpu_count() or 1)
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENVIRONMENT_VARIABLE}={raw!r} is not an integer") from None
    if threads < 1:
        raise ValueError(f"thread count {threads} must be at least 1")
    return threads


class TrialExecutor:
    """
    Maps ``fn(index, rng)`` over trial indices.

    Every trial gets the generator ``trial_generator(seed, index)`` and results
    come back in index order, so the output is identical for any thread count.
    """

    def __init__(self, threads: int = 1):
        if threads < 1:
            raise ValueError(f"threads={threads} must be at least 1")
        self.threads = threads

    def map(
        self,
        fn: Callable[[int, np.random.Generator], T],
        seed: int,
        count: int,
        start: int = 0,
    ) -> List[T]:
        """Run ``count`` trials with indices ``start .. start + count - 1``."""
        indices = range(start, start + count)
        if self.threads == 1 or count <= 1:
            return [fn(i, trial_generator(seed, i)) for i in indices]

        logger.debug("Dispatching trials", {"count": count, "threads": self.threads})
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            futures = [pool.submit(fn, i, trial_generator(seed, i)) for i in indices]
            return [f.result() for f in futures]

    def map_chunks(
        self,
        fn: Callable[[int, np.random.Generator], T],
        seed: int,
        sizes: Sequence[int],
    ) -> List[T]:
        """Run ``fn(size, rng)`` once per chunk; chunk j uses generator index j."""
        return self.map(lambda j, rng: fn(sizes[j], rng), seed, len(sizes))

    def __repr__(self) -> str:
        return f"TrialExecutor(threads={self.threads})"


_default_executor = TrialExecutor(1)


def default_executor() -> TrialExecutor:
    """The process-wide executor used when a service is not given one."""
    return _default_executor


def set_default_executor(executor: TrialExecutor) -> None:
    global _default_executor
    _default_executor = executor


def derive_seeds(seed: int, count: int) -> List[int]:
    """``count`` independent integer seeds derived from a master seed."""
    state = np.random.SeedSequence(int(seed)).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]
