"""Registry of the named verification checks exposed by ``marginlab verify``."""

import inspect
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional

import numpy as np

from application.services import verify
from application.services.margins import DEFAULT_C_GAMMA, lift_distribution, lift_hypothesis
from domain.entities.check_report import CheckReport
from domain.errors import UnknownCheckError
from infrastructure.parallel.trial_executor import TrialExecutor, derive_seeds

from .config import DistributionSpec


@dataclass(frozen=True)
class CheckEntry:
    name: str
    summary: str
    runner: Callable[..., CheckReport]
    trials_keyword: Optional[str]
    needs_distribution: bool = False

    def defaults(self) -> Dict[str, Any]:
        """Keyword defaults of the runner, excluding the wiring arguments."""
        skip = {"seed", "executor", "spec"}
        return {
            name: p.default
            for name, p in inspect.signature(self.runner).parameters.items()
            if p.default is not inspect.Parameter.empty and name not in skip
        }

    def run(
        self,
        seed: int,
        executor: TrialExecutor,
        trials: Optional[int] = None,
        params: Optional[Mapping[str, Any]] = None,
        spec: Optional[DistributionSpec] = None,
    ) -> CheckReport:
        kwargs: Dict[str, Any] = dict(params or {})
        unknown = sorted(set(kwargs) - set(self.defaults()))
        if unknown:
            raise TypeError(f"check '{self.name}' has no parameter(s) {unknown}")
        if trials is not None and self.trials_keyword is not None:
            kwargs[self.trials_keyword] = trials
        if self.needs_distribution:
            kwargs["spec"] = spec or DistributionSpec()
        return self.runner(seed=seed, executor=executor, **kwargs)


def _lifted(spec: DistributionSpec, c_gamma: float):
    dist, w = spec.build()
    return lift_distribution(dist, c_gamma), lift_hypothesis(w)


def _bernstein_margin(
    spec: DistributionSpec,
    seed: int,
    executor: TrialExecutor,
    gamma: float = 0.1,
    n: int = 1000,
    delta: float = 0.1,
    trials: int = 10_000,
    k: int = 64,
    constant: float = verify.CONSTANTS["bernstein"].value,
) -> CheckReport:
    dist, w = spec.build()
    return verify.check_bernstein_margin(
        dist, w, gamma, n, delta, trials, seed, k=k, constant=constant, executor=executor
    )


def _phirho_sandwich(
    spec: DistributionSpec,
    seed: int,
    executor: TrialExecutor,
    gamma_i: float = 0.1,
    gamma: float = 0.15,
    k: int = 256,
    samples: int = 50_000,
    draws: int = 1000,
    n: int = 200,
    c_gamma: float = DEFAULT_C_GAMMA,
    event_scale: float = 1.0,
) -> CheckReport:
    dist, w = _lifted(spec, c_gamma)
    sample = dist.sample(n, np.random.default_rng(derive_seeds(seed, 3)[2]))
    return verify.check_phirho_sandwich(
        dist, sample, w, gamma_i, gamma, k, samples, seed, draws=draws,
        c_gamma=c_gamma, event_scale=event_scale, executor=executor,
    )


def _loss_decomposition(
    spec: DistributionSpec,
    seed: int,
    executor: TrialExecutor,
    gamma_i: float = 0.1,
    k: int = 64,
    draws: int = 200,
    n: int = 200,
    gamma: Optional[float] = None,
    c_gamma: float = DEFAULT_C_GAMMA,
) -> CheckReport:
    dist, w = _lifted(spec, c_gamma)
    sample = dist.sample(n, np.random.default_rng(derive_seeds(seed, 3)[2]))
    return verify.check_loss_decomposition(
        dist, w, gamma_i, k, draws, seed, sample=sample, gamma=gamma, executor=executor
    )


CHECKS: Dict[str, CheckEntry] = {
    entry.name: entry
    for entry in [
        CheckEntry("p-in-unit", "rounding probability lies in [0, 1]",
                   verify.check_p_in_unit, "trials"),
        CheckEntry("dist-determinism", "projected margin law depends only on y<w, x>",
                   verify.check_dist_determinism, "samples"),
        CheckEntry("monotonicity", "Pr[m > gamma_i/2 | alpha] nondecreasing on [0, gamma_i]",
                   verify.check_monotonicity, "samples"),
        CheckEntry("lipschitz", "phi and rho slopes within the Lipschitz budget",
                   verify.check_lipschitz, "samples"),
        CheckEntry("chi-square-tail", "chi-square concentration tail",
                   verify.check_chi_square_tail, "trials"),
        CheckEntry("bernstein-margin", "projected margin loss concentrates over samples",
                   _bernstein_margin, "trials", needs_distribution=True),
        CheckEntry("phirho-sandwich", "discretization events bounded by phi and rho",
                   _phirho_sandwich, "draws", needs_distribution=True),
        CheckEntry("rounding-geometry", "norm and inner-product facts of snapping",
                   verify.check_rounding_geometry, "samples"),
        CheckEntry("unbiased-rounding", "snapped coordinates are unbiased",
                   verify.check_unbiased_rounding, "trials"),
        CheckEntry("margin-preservation", "projection keeps margins up to a decaying tail",
                   verify.check_margin_preservation, "trials"),
        CheckEntry("loss-decomposition", "exact per-draw loss identity",
                   _loss_decomposition, "draws", needs_distribution=True),
    ]
}


def get_check(name: str) -> CheckEntry:
    try:
        return CHECKS[name]
    except KeyError:
        raise UnknownCheckError(name, sorted(CHECKS)) from None


def check_names() -> List[str]:
    return list(CHECKS)
