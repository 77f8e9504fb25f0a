"""
Numerical verification of the discretization machinery.

Each ``check_*`` function runs one exact or Monte Carlo experiment and returns
a ``CheckReport``. Statistical checks compare against a bound constant taken
from ``CONSTANTS`` plus a sigma allowance; every such constant is a parameter
so that a deliberately wrong value can be shown to fail.
"""

import functools
import inspect
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import ks_2samp, norm

from application.services.discretize import (
    EXACT_INDEX_LIMIT,
    CoupledDraws,
    direct_margins,
    discretized_margins,
    estimate_preservation,
    planted_pair,
    rounding_geometry_violations,
    rounding_probabilities,
    sample_draw,
    sample_margins,
    sample_snapped_pairs,
)
from application.services.margins import DEFAULT_C_GAMMA, margins_of, true_loss
from domain.entities.check_report import CheckReport
from domain.errors import PreconditionError
from domain.value_objects.grid import grid_pitch, grid_value
from domain.value_objects.labeled_data import DiscreteDistribution, Sample
from domain.value_objects.monte_carlo_estimate import MonteCarloEstimate
from domain.value_objects.unit_vector import UnitVector
from infrastructure.logging.logger_factory import get_module_logger
from infrastructure.parallel.trial_executor import (
    TrialExecutor,
    chunk_sizes,
    default_executor,
    derive_seeds,
)

logger = get_module_logger(__name__)


@dataclass(frozen=True)
class LedgerConstant:
    value: float
    role: str


CONSTANTS: Dict[str, LedgerConstant] = {
    "tail": LedgerConstant(
        800.0,
        "prefactor and exponent divisor in c exp(-k gamma^2 / c), used for the "
        "margin-preservation tail, rho(c_gamma) and the Lipschitz budget",
    ),
    "dimension": LedgerConstant(
        72.0,
        "k >= 72 ln(2) / gamma^2, the projection dimension assumed by the Lipschitz analysis",
    ),
    "chi_square": LedgerConstant(8.0, "Pr[|Y/k - 1| >= x] <= 2 exp(-k x^2 / 8) for Y ~ chi^2_k"),
    "bernstein": LedgerConstant(
        8.0,
        "variance factor in the deviation sqrt(c L ln(1/delta) / n) + 2 ln(1/delta) / n "
        "of the projected margin loss",
    ),
}

SIGMAS = 3.0
KS_THRESHOLD = 0.01
EXACT_TOLERANCE = 1e-12
# Two-sided tail mass of a 3 sigma normal allowance.
THREE_SIGMA_LEVEL = 2.0 * norm.sf(SIGMAS)

P_IN_UNIT_DIMENSIONS = (1, 2, 3, 7, 64, 512, 4096)
P_IN_UNIT_VALUE_RANGE = 10.0
# Every other value gets a log-uniform magnitude in [1e-300, 1e300] and a random sign.
P_IN_UNIT_LOG10_RANGE = 300.0
P_IN_UNIT_GRID_SPAN = 100
DEFAULT_PAIR_DIMENSIONS = (10, 20, 50, 100, 200)


def _sampling_arguments(bound: inspect.BoundArguments) -> Tuple[int, int]:
    args = bound.arguments
    trials = next(
        (int(args[key]) for key in ("trials", "samples", "draws") if key in args), 0
    )
    return int(args.get("seed", 0)), trials


def _logged_check(fn: Callable[..., CheckReport]) -> Callable[..., CheckReport]:
    signature = inspect.signature(fn)

    @functools.wraps(fn)
    def wrapper(*args, **kwargs) -> CheckReport:
        bound = signature.bind(*args, **kwargs)
        bound.apply_defaults()
        seed, trials = _sampling_arguments(bound)
        logger.log_check_start(fn.__name__, seed, trials)
        started = time.perf_counter()
        report = fn(*args, **kwargs)
        logger.log_check_complete(
            report.name, report.status.value, int((time.perf_counter() - started) * 1000)
        )
        return report

    return wrapper


def _pooled(a: MonteCarloEstimate, b: MonteCarloEstimate) -> float:
    return math.sqrt(a.stderr * a.stderr + b.stderr * b.stderr)


@dataclass
class _CoupledEvents:
    """Event frequencies at several alphas from one shared set of draws."""

    probabilities: List[MonteCarloEstimate]
    differences: List[MonteCarloEstimate]


def _coupled_events(
    alphas: Sequence[float],
    cut: float,
    above: bool,
    k: int,
    samples: int,
    seed: int,
    executor: TrialExecutor,
    pairs: Sequence[Tuple[int, int]] = (),
) -> _CoupledEvents:
    """
    Frequencies of {m > cut} (or {m <= cut}) at each alpha and paired
    differences of the indicators for ``pairs`` of alpha positions.
    """
    count = len(alphas)

    def chunk(size: int, rng: np.random.Generator) -> np.ndarray:
        draws = CoupledDraws.draw(k, size, rng)
        events = np.empty((count, size), dtype=np.int8)
        for j, alpha in enumerate(alphas):
            margins = draws.margins(alpha)
            events[j] = (margins > cut) if above else (margins <= cut)
        out = np.empty(count + 2 * len(pairs))
        out[:count] = events.sum(axis=1)
        for p, (hi, lo) in enumerate(pairs):
            diff = events[hi].astype(np.int64) - events[lo]
            out[count + 2 * p] = diff.sum()
            out[count + 2 * p + 1] = (diff * diff).sum()
        return out

    totals = np.sum(executor.map_chunks(chunk, seed, chunk_sizes(samples)), axis=0)
    probabilities = [MonteCarloEstimate.from_indicators(int(h), samples) for h in totals[:count]]
    differences = []
    for p in range(len(pairs)):
        mean = totals[count + 2 * p] / samples
        second = totals[count + 2 * p + 1] / samples
        stderr = math.sqrt(max(second - mean * mean, 0.0) / samples)
        differences.append(MonteCarloEstimate(float(mean), stderr, samples))
    return _CoupledEvents(probabilities, differences)


def _check_surrogate_domain(alphas: Sequence[float], gamma_i: float, c_gamma: float) -> None:
    if not 0.0 < gamma_i < c_gamma:
        raise PreconditionError("surrogate", f"gamma_i={gamma_i!r} must lie in (0, c_gamma)")
    for alpha in alphas:
        if abs(alpha) > c_gamma + EXACT_TOLERANCE:
            raise PreconditionError("surrogate", f"alpha={alpha!r} outside [-c_gamma, c_gamma]")


def surrogate_estimates(
    alphas: Sequence[float],
    gamma_i: float,
    k: int,
    samples: int,
    seed: int,
    which: str = "phi",
    c_gamma: float = DEFAULT_C_GAMMA,
    executor: Optional[TrialExecutor] = None,
) -> List[MonteCarloEstimate]:
    """
    phi or rho at every alpha, sharing one Monte Carlo pass.

    phi(a) = Pr[m > gamma_i/2 | a] for a <= 0, (gamma_i - a)/gamma_i phi(0) on
    (0, gamma_i] and 0 above. rho(a) = Pr[m <= gamma_i/2 | a] for a > gamma_i,
    (a / gamma_i) rho(gamma_i) on (0, gamma_i] and 0 for a <= 0.
    """
    if which not in ("phi", "rho"):
        raise ValueError(f"unknown surrogate '{which}'")
    _check_surrogate_domain(alphas, gamma_i, c_gamma)
    executor = executor or default_executor()

    plan: List[Tuple[Optional[float], float]] = []
    for alpha in alphas:
        if which == "phi":
            if alpha > gamma_i:
                plan.append((None, 0.0))
            elif alpha <= 0.0:
                plan.append((alpha, 1.0))
            else:
                plan.append((0.0, (gamma_i - alpha) / gamma_i))
        else:
            if alpha <= 0.0:
                plan.append((None, 0.0))
            elif alpha > gamma_i:
                plan.append((alpha, 1.0))
            else:
                plan.append((gamma_i, alpha / gamma_i))

    anchors = sorted({a for a, _ in plan if a is not None})
    probabilities: Dict[float, MonteCarloEstimate] = {}
    if anchors:
        events = _coupled_events(
            anchors, gamma_i / 2.0, which == "phi", k, samples, seed, executor
        )
        probabilities = dict(zip(anchors, events.probabilities))

    return [
        MonteCarloEstimate.exact(0.0) if anchor is None else probabilities[anchor].scaled(factor)
        for anchor, factor in plan
    ]


def estimate_phi(
    alpha: float,
    gamma_i: float,
    k: int,
    samples: int,
    seed: int,
    c_gamma: float = DEFAULT_C_GAMMA,
    executor: Optional[TrialExecutor] = None,
) -> MonteCarloEstimate:
    return surrogate_estimates([alpha], gamma_i, k, samples, seed, "phi", c_gamma, executor)[0]


def estimate_rho(
    alpha: float,
    gamma_i: float,
    k: int,
    samples: int,
    seed: int,
    c_gamma: float = DEFAULT_C_GAMMA,
    executor: Optional[TrialExecutor] = None,
) -> MonteCarloEstimate:
    return surrogate_estimates([alpha], gamma_i, k, samples, seed, "rho", c_gamma, executor)[0]


def tail_bound(gamma: float, k: int, constant: float = CONSTANTS["tail"].value) -> float:
    """c exp(-gamma^2 k / c)."""
    return constant * math.exp(-gamma * gamma * k / constant)


def lipschitz_budget(gamma_i: float, k: int, constant: float = CONSTANTS["tail"].value) -> float:
    """c exp(-gamma_i^2 k / c) (sqrt(k) + 1/gamma_i)."""
    return tail_bound(gamma_i, k, constant) * (math.sqrt(k) + 1.0 / gamma_i)


@_logged_check
def check_p_in_unit(
    trials: int = 1_000_000, seed: int = 0, executor: Optional[TrialExecutor] = None
) -> CheckReport:
    """
    Rounding probabilities lie in [0, 1] and bracket the value; grid points
    round with p = 1 and midpoints with p = 1/2.
    """
    executor = executor or default_executor()
    sizes = chunk_sizes(trials)

    def chunk(index: int, rng: np.random.Generator) -> Tuple[int, int, float]:
        k = P_IN_UNIT_DIMENSIONS[index % len(P_IN_UNIT_DIMENSIONS)]
        size = sizes[index]
        values = rng.uniform(-P_IN_UNIT_VALUE_RANGE, P_IN_UNIT_VALUE_RANGE, size)
        wide = rng.uniform(-P_IN_UNIT_LOG10_RANGE, P_IN_UNIT_LOG10_RANGE, size)
        signs = rng.choice(np.array([-1.0, 1.0]), size)
        values[1::2] = (signs * 10.0**wide)[1::2]
        z, p = rounding_probabilities(values, k)
        lo, hi = grid_value(z, k), grid_value(z + 1, k)
        # bracketing is exact only below the index limit
        exact = np.abs(z) < EXACT_INDEX_LIMIT
        unbracketed = exact & ((lo > values) | (hi <= values))
        bad = ~np.isfinite(p) | (p < 0.0) | (p > 1.0) | unbracketed

        anchors = rng.integers(-P_IN_UNIT_GRID_SPAN, P_IN_UNIT_GRID_SPAN, 64)
        _, p_grid = rounding_probabilities(grid_value(anchors, k), k)
        _, p_mid = rounding_probabilities((anchors + 1) * grid_pitch(k), k)
        return (
            int(np.count_nonzero(bad)),
            int(np.count_nonzero(p_grid != 1.0)),
            float(np.max(np.abs(p_mid - 0.5))),
        )

    results = executor.map(chunk, seed, len(sizes))
    violations = sum(r[0] for r in results)
    grid_violations = sum(r[1] for r in results)
    midpoint_error = max((r[2] for r in results), default=0.0)
    ok = violations == 0 and grid_violations == 0 and midpoint_error <= EXACT_TOLERANCE
    report = CheckReport.from_outcome(
        "p-in-unit", ok, trials, seed, threshold=0.0, parameters={"trials": trials}
    )
    report.add_estimate("violations", violations)
    report.add_estimate("grid_point_violations", grid_violations)
    report.add_estimate("midpoint_max_error", midpoint_error)
    return report


@_logged_check
def check_dist_determinism(
    alpha: float = 0.0,
    k: int = 64,
    samples: int = 100_000,
    pairs: int = 5,
    seed: int = 0,
    alt_alpha: Optional[float] = None,
    dims: Sequence[int] = DEFAULT_PAIR_DIMENSIONS,
    executor: Optional[TrialExecutor] = None,
) -> CheckReport:
    """
    Two-sample KS tests of explicit d-dimensional pipelines against the
    dimension-free sampler. Pairs alternate the label sign and cycle through
    ``dims``. ``alt_alpha`` runs the explicit pipelines at a different margin.
    """
    executor = executor or default_executor()
    seeds = derive_seeds(seed, pairs + 1)
    sizes = chunk_sizes(samples)
    reference = np.concatenate(
        executor.map_chunks(lambda size, rng: sample_margins(alpha, k, size, rng), seeds[0], sizes)
    )
    target = alpha if alt_alpha is None else alt_alpha

    report = CheckReport.from_outcome(
        "dist-determinism", True, samples, seed, threshold=KS_THRESHOLD,
        parameters={"alpha": alpha, "alt_alpha": alt_alpha, "k": k, "pairs": pairs},
    )
    ok = True
    for j in range(pairs):
        d = dims[j % len(dims)]
        label = 1 if j % 2 == 0 else -1
        w, point = planted_pair(target, d, label, np.random.default_rng(seeds[j + 1]))
        direct = np.concatenate(
            executor.map_chunks(
                lambda size, rng: direct_margins(w, point, k, size, rng), seeds[j + 1], sizes
            )
        )
        result = ks_2samp(reference, direct, method="asymp")
        pvalue = float(result.pvalue)
        report.add_estimate(f"ks_pvalue_pair{j}", pvalue)
        report.details.append(f"pair{j}: d={d} y={label:+d} D={float(result.statistic):.5f}")
        ok = ok and pvalue > KS_THRESHOLD
    return _with_status(report, ok)


def _with_status(report: CheckReport, ok: bool, inconclusive: bool = False) -> CheckReport:
    return CheckReport.from_outcome(
        report.name, ok, report.trials, report.seed, inconclusive,
        estimates=report.estimates, stderrs=report.stderrs, threshold=report.threshold,
        parameters=report.parameters, details=report.details,
    )


@_logged_check
def check_monotonicity(
    k: int = 512,
    gamma_i: float = 0.1,
    alphas: Sequence[float] = (0.0, 0.025, 0.05, 0.075, 0.1),
    samples: int = 100_000,
    seed: int = 0,
    c_gamma: float = DEFAULT_C_GAMMA,
    expect_increasing: bool = True,
    executor: Optional[TrialExecutor] = None,
) -> CheckReport:
    """
    q(alpha) = Pr[m > gamma_i / 2 | alpha] is nondecreasing on [0, gamma_i],
    equivalently 1 - q is nonincreasing, within 3 pooled standard errors.
    ``expect_increasing=False`` asserts the opposite order.
    """
    alphas = [float(a) for a in alphas]
    if any(b < a for a, b in zip(alphas, alphas[1:])):
        raise PreconditionError("check_monotonicity", "alphas must be ascending")
    if alphas and (alphas[0] < 0.0 or alphas[-1] > gamma_i):
        raise PreconditionError("check_monotonicity", "alphas must lie in [0, gamma_i]")
    if gamma_i > c_gamma / 2.0:
        raise PreconditionError("check_monotonicity", "gamma_i <= c_gamma / 2 required")
    executor = executor or default_executor()

    report = CheckReport.from_outcome(
        "monotonicity", True, samples, seed, threshold=SIGMAS,
        parameters={"k": k, "gamma_i": gamma_i, "alphas": alphas},
    )
    if len(alphas) < 2:
        report.details.append("fewer than two alphas; nothing to compare")
        return report

    events = _coupled_events(alphas, gamma_i / 2.0, True, k, samples, seed, executor)
    q = events.probabilities
    ok = True
    for j, (alpha, estimate) in enumerate(zip(alphas, q)):
        report.add_estimate(f"q({alpha:g})", estimate.value, estimate.stderr)
        if j == 0:
            continue
        allowance = SIGMAS * _pooled(q[j - 1], estimate)
        if expect_increasing:
            holds = estimate.value >= q[j - 1].value - allowance
        else:
            holds = estimate.value <= q[j - 1].value + allowance
        if not holds:
            report.details.append(f"order broken between alpha={alphas[j - 1]:g} and {alpha:g}")
        ok = ok and holds
    return _with_status(report, ok)


def _flat_branch_slope(
    which: str,
    gamma_i: float,
    k: int,
    h: float,
    samples: int,
    seed: int,
    c_gamma: float,
    executor: TrialExecutor,
) -> MonteCarloEstimate:
    """Central difference of phi above gamma_i, or of rho below 0, where both are flat."""
    center = gamma_i + 2.0 * h if which == "phi" else -2.0 * h
    left, right = surrogate_estimates(
        [center - h, center + h], gamma_i, k, samples, seed, which, c_gamma, executor
    )
    return MonteCarloEstimate(
        (right.value - left.value) / (2.0 * h),
        math.hypot(left.stderr, right.stderr) / (2.0 * h),
        max(left.trials, right.trials),
    )


@_logged_check
def check_lipschitz(
    gamma_i: float = 0.2,
    k: int = 4096,
    h: float = 0.02,
    samples: int = 200_000,
    seed: int = 0,
    grid_points: int = 5,
    constant: float = CONSTANTS["tail"].value,
    c_gamma: float = DEFAULT_C_GAMMA,
    executor: Optional[TrialExecutor] = None,
) -> CheckReport:
    """
    Finite-difference slopes of phi and rho on all three branches against the
    budget c exp(-gamma_i^2 k / c)(sqrt(k) + 1/gamma_i).

    INCONCLUSIVE when the Monte Carlo noise of a slope, 2 stderr / h, reaches
    a tenth of the budget.
    """
    minimum_k = CONSTANTS["dimension"].value * math.log(2.0) / (gamma_i * gamma_i)
    if k < minimum_k:
        raise PreconditionError("check_lipschitz", f"k >= {minimum_k:.1f} required, got {k}")
    if h <= 0.0 or grid_points < 1:
        raise PreconditionError("check_lipschitz", "h > 0 and grid_points >= 1 required")
    if not 0.0 < gamma_i < c_gamma or gamma_i + 3.0 * h > c_gamma or 2.0 * h > c_gamma:
        raise PreconditionError("check_lipschitz", "step h too large for the branch intervals")
    executor = executor or default_executor()
    budget = lipschitz_budget(gamma_i, k, constant)
    cut = gamma_i / 2.0

    phi_centers = np.linspace(-c_gamma + h, -h, grid_points)
    rho_centers = np.linspace(gamma_i + 2.0 * h, c_gamma - h, grid_points)

    def branch(centers: np.ndarray, anchor: float, above: bool) -> _CoupledEvents:
        alphas = [anchor]
        for center in centers:
            alphas.extend([float(center - h), float(center + h)])
        pairs = [(2 + 2 * j, 1 + 2 * j) for j in range(len(centers))]
        return _coupled_events(alphas, cut, above, k, samples, seed, executor, pairs)

    phi_events = branch(phi_centers, 0.0, True)
    rho_events = branch(rho_centers, gamma_i, False)

    report = CheckReport.from_outcome(
        "lipschitz", True, samples, seed, threshold=budget,
        parameters={"gamma_i": gamma_i, "k": k, "h": h, "constant": constant},
    )
    ok = True
    noise = 0.0
    for name, events in (("phi", phi_events), ("rho", rho_events)):
        slopes = [d.scaled(1.0 / (2.0 * h)) for d in events.differences]
        steepest = max(slopes, key=lambda s: abs(s.value))
        report.add_estimate(f"{name}_slope_max", abs(steepest.value), steepest.stderr)
        ok = ok and all(abs(s.value) <= budget + SIGMAS * s.stderr for s in slopes)
        noise = max(noise, 2.0 * max(p.stderr for p in events.probabilities) / h)

        anchor = events.probabilities[0]
        interpolation = anchor.scaled((-1.0 if name == "phi" else 1.0) / gamma_i)
        report.add_estimate(
            f"{name}_interpolation_slope", interpolation.value, interpolation.stderr
        )
        ok = ok and abs(interpolation.value) <= budget + SIGMAS * interpolation.stderr
        flat = _flat_branch_slope(name, gamma_i, k, h, samples, seed, c_gamma, executor)
        report.add_estimate(f"{name}_flat_slope", flat.value, flat.stderr)
        ok = ok and flat.value == 0.0

    report.add_estimate("slope_noise", noise)
    inconclusive = noise >= 0.1 * budget
    if inconclusive:
        report.details.append(
            f"slope noise {noise:.3g} exceeds 10% of the budget; enlarge h or samples"
        )
    return _with_status(report, ok, inconclusive)


@_logged_check
def check_chi_square_tail(
    k: int = 100,
    x: float = 0.5,
    trials: int = 100_000,
    seed: int = 0,
    constant: float = CONSTANTS["chi_square"].value,
    executor: Optional[TrialExecutor] = None,
) -> CheckReport:
    """Empirical Pr[|Y/k - 1| >= x] against 2 exp(-k x^2 / constant), Y ~ chi^2_k."""
    if not 0.0 < x < 1.0:
        raise PreconditionError("check_chi_square_tail", f"x={x!r} outside (0, 1)")
    executor = executor or default_executor()

    def chunk(size: int, rng: np.random.Generator) -> np.ndarray:
        scaled = rng.chisquare(k, size) / k
        return np.array([
            np.count_nonzero(np.abs(scaled - 1.0) >= x), scaled.sum(), (scaled * scaled).sum()
        ])

    hits, total, squares = np.sum(executor.map_chunks(chunk, seed, chunk_sizes(trials)), axis=0)
    tail = MonteCarloEstimate.from_indicators(int(hits), trials)
    mean = total / trials
    mean_stderr = math.sqrt(max(squares / trials - mean * mean, 0.0) / trials)
    bound = min(2.0 * math.exp(-k * x * x / constant), 1.0)
    allowance = SIGMAS * math.sqrt(bound * (1.0 - bound) / trials)

    ok = tail.value <= bound + allowance and abs(mean - 1.0) <= SIGMAS * mean_stderr
    report = CheckReport.from_outcome(
        "chi-square-tail", ok, trials, seed, threshold=bound,
        parameters={"k": k, "x": x, "constant": constant},
    )
    report.add_estimate("tail_frequency", tail.value, tail.stderr)
    report.add_estimate("mean_y_over_k", mean, mean_stderr)
    return report


@_logged_check
def check_bernstein_margin(
    dist: DiscreteDistribution,
    w: UnitVector,
    gamma: float,
    n: int,
    delta: float,
    trials: int,
    seed: int,
    k: int = 64,
    draw=None,
    constant: float = CONSTANTS["bernstein"].value,
    executor: Optional[TrialExecutor] = None,
) -> CheckReport:
    """
    For a fixed projection, |L_AD(h) - L_AS(h)| exceeds
    sqrt(constant L_AD(h) ln(1/delta) / n) + 2 ln(1/delta) / n in at most a
    delta fraction of resampled S (plus 3 sigma).
    """
    if not 0.0 < delta <= 1.0:
        raise PreconditionError("check_bernstein_margin", f"delta={delta!r} outside (0, 1]")
    executor = executor or default_executor()
    draw = draw if draw is not None else sample_draw(k, dist.dim, np.random.default_rng(seed))
    losses = discretized_margins(draw, w, dist.features, dist.labels) <= gamma
    population = float(np.sum(dist.weights[losses]))
    log_term = -math.log(delta)
    deviation = math.sqrt(constant * population * log_term / n) + 2.0 * log_term / n

    def chunk(size: int, rng: np.random.Generator) -> int:
        counts = rng.multinomial(n, dist.weights, size=size)
        empirical = counts @ losses.astype(np.float64) / n
        return int(np.count_nonzero(np.abs(population - empirical) > deviation))

    violations = sum(executor.map_chunks(chunk, seed, chunk_sizes(trials)))
    frequency = MonteCarloEstimate.from_indicators(violations, trials)
    allowed = delta + SIGMAS * math.sqrt(delta * (1.0 - delta) / trials)
    report = CheckReport.from_outcome(
        "bernstein-margin", frequency.value <= allowed, trials, seed, threshold=allowed,
        parameters={"gamma": gamma, "n": n, "delta": delta, "k": draw.k, "constant": constant},
    )
    report.add_estimate("violation_frequency", frequency.value, frequency.stderr)
    report.add_estimate("projected_margin_loss", population)
    report.add_estimate("deviation_threshold", deviation)
    return report


@_logged_check
def check_phirho_sandwich(
    dist: DiscreteDistribution,
    sample: Sample,
    w: UnitVector,
    gamma_i: float,
    gamma: float,
    k: int,
    samples: int,
    seed: int,
    draws: int = 2000,
    c_gamma: float = DEFAULT_C_GAMMA,
    event_scale: float = 1.0,
    executor: Optional[TrialExecutor] = None,
) -> CheckReport:
    """
    The four inequalities bounding discretization events by phi and rho:

        E[Pr_D[m > gamma_i/2, a <= 0]]     <= E_D[phi(a)]
        E[Pr_S[m > gamma_i/2, a <= gamma]] >= E_S[phi(a)]
        E[Pr_S[m <= gamma_i/2, a > gamma]] <= E_S[rho(a)]
        E[Pr_D[m <= gamma_i/2, a > 0]]     >= E_D[rho(a)]

    with m = y<h, Ax>, a = y<w, x>. Left sides use ``draws`` explicit (A, t);
    ``event_scale`` multiplies the gamma_i/2 cut on the left sides only.
    """
    if not gamma_i < gamma <= 2.0 * gamma_i:
        raise PreconditionError("check_phirho_sandwich", "gamma in (gamma_i, 2 gamma_i] required")
    executor = executor or default_executor()
    alpha_d = margins_of(w, dist.features, dist.labels)
    alpha_s = margins_of(w, sample.features, sample.labels)
    _check_surrogate_domain(np.concatenate([alpha_d, alpha_s]), gamma_i, c_gamma)
    cut = event_scale * gamma_i / 2.0
    left_seed, right_seed = derive_seeds(seed, 2)

    def one_draw(index: int, rng: np.random.Generator) -> np.ndarray:
        draw = sample_draw(k, dist.dim, rng)
        m_d = discretized_margins(draw, w, dist.features, dist.labels)
        m_s = discretized_margins(draw, w, sample.features, sample.labels)
        return np.array([
            np.sum(dist.weights[(m_d > cut) & (alpha_d <= 0.0)]),
            np.mean((m_s > cut) & (alpha_s <= gamma)),
            np.mean((m_s <= cut) & (alpha_s > gamma)),
            np.sum(dist.weights[(m_d <= cut) & (alpha_d > 0.0)]),
        ])

    per_draw = np.vstack(executor.map(one_draw, left_seed, draws))
    left = [MonteCarloEstimate.from_samples(per_draw[:, j]) for j in range(4)]

    def expectation(which: str, alphas: np.ndarray, weights: np.ndarray) -> MonteCarloEstimate:
        values = surrogate_estimates(
            list(alphas), gamma_i, k, samples, right_seed, which, c_gamma, executor
        )
        value = float(sum(wt * v.value for wt, v in zip(weights, values)))
        stderr = float(sum(wt * v.stderr for wt, v in zip(weights, values)))
        return MonteCarloEstimate(value, stderr, samples)

    uniform = np.full(sample.n, 1.0 / sample.n)
    right = [
        expectation("phi", alpha_d, dist.weights),
        expectation("phi", alpha_s, uniform),
        expectation("rho", alpha_s, uniform),
        expectation("rho", alpha_d, dist.weights),
    ]

    report = CheckReport.from_outcome(
        "phirho-sandwich", True, draws, seed, threshold=SIGMAS,
        parameters={"gamma_i": gamma_i, "gamma": gamma, "k": k, "event_scale": event_scale},
    )
    ok = True
    for j, (lhs, rhs) in enumerate(zip(left, right)):
        allowance = SIGMAS * _pooled(lhs, rhs)
        if j in (0, 2):
            holds = lhs.value <= rhs.value + allowance
        else:
            holds = lhs.value >= rhs.value - allowance
        report.add_estimate(f"lhs{j + 1}", lhs.value, lhs.stderr)
        report.add_estimate(f"rhs{j + 1}", rhs.value, rhs.stderr)
        if not holds:
            report.details.append(f"inequality {j + 1} violated")
        ok = ok and holds
    return _with_status(report, ok)


@_logged_check
def check_rounding_geometry(
    k: int = 64,
    samples: int = 100_000,
    seed: int = 0,
    executor: Optional[TrialExecutor] = None,
) -> CheckReport:
    """Deterministic norm and inner-product facts on sampled (X, X') pairs."""
    executor = executor or default_executor()

    def chunk(size: int, rng: np.random.Generator) -> Dict[str, int]:
        return rounding_geometry_violations(*sample_snapped_pairs(k, size, rng))

    totals: Dict[str, int] = {}
    for counts in executor.map_chunks(chunk, seed, chunk_sizes(samples)):
        for key, value in counts.items():
            totals[key] = totals.get(key, 0) + value

    report = CheckReport.from_outcome(
        "rounding-geometry", not any(totals.values()), samples, seed, threshold=0.0,
        parameters={"k": k},
    )
    for key, value in totals.items():
        report.add_estimate(key, value)
    return report


@_logged_check
def check_unbiased_rounding(
    k: int = 64,
    d: int = 50,
    trials: int = 100_000,
    seed: int = 0,
    offset_shift: float = 0.0,
    executor: Optional[TrialExecutor] = None,
) -> CheckReport:
    """
    With A fixed, the mean over offsets of each snapped coordinate equals
    (Aw)_i within 3 sigma family-wise, sigma_i = pitch sqrt(p_i (1 - p_i) / trials).
    ``offset_shift`` biases the rounding rule to t <= p + shift.
    """
    executor = executor or default_executor()
    rng = np.random.default_rng(seed)
    draw = sample_draw(k, d, rng)
    w = UnitVector.from_direction(rng.standard_normal(d))
    values = draw.project(w.coords)
    z, p = rounding_probabilities(values, k)
    low, high = grid_value(z, k), grid_value(z + 1, k)
    cutoff = np.clip(p + offset_shift, 0.0, 1.0)

    def chunk(size: int, rng: np.random.Generator) -> np.ndarray:
        return np.count_nonzero(rng.random((size, k)) <= cutoff, axis=0)

    downs = np.sum(executor.map_chunks(chunk, seed, chunk_sizes(trials)), axis=0)
    means = (downs * low + (trials - downs) * high) / trials
    sigma = grid_pitch(k) * np.sqrt(p * (1.0 - p) / trials)
    allowance = float(norm.isf(THREE_SIGMA_LEVEL / (2.0 * k)))
    errors = np.abs(means - values)
    ok = bool(np.all(errors <= allowance * sigma + EXACT_TOLERANCE))
    standardized = np.where(sigma > 0.0, errors / np.where(sigma > 0.0, sigma, 1.0), 0.0)

    report = CheckReport.from_outcome(
        "unbiased-rounding", ok, trials, seed, threshold=allowance,
        parameters={"k": k, "d": d, "offset_shift": offset_shift},
    )
    report.add_estimate("max_standardized_error", float(np.max(standardized)))
    report.add_estimate("max_abs_error", float(np.max(errors)))
    return report


@_logged_check
def check_margin_preservation(
    alpha: float = 0.0,
    gamma: float = 0.25,
    ks: Sequence[int] = (64, 128, 256, 512),
    trials: int = 100_000,
    seed: int = 0,
    constant: float = CONSTANTS["tail"].value,
    executor: Optional[TrialExecutor] = None,
) -> CheckReport:
    """
    Pr[|m - alpha| > gamma] is nonincreasing in k and below
    c exp(-gamma^2 k / c) at every k, within 3 sigma.
    """
    executor = executor or default_executor()
    report = CheckReport.from_outcome(
        "margin-preservation", True, trials, seed, threshold=SIGMAS,
        parameters={"alpha": alpha, "gamma": gamma, "ks": list(ks), "constant": constant},
    )
    ok = True
    previous: Optional[MonteCarloEstimate] = None
    for k in ks:
        estimate = estimate_preservation(alpha, gamma, k, trials, seed, executor=executor)
        bound = tail_bound(gamma, k, constant)
        report.add_estimate(f"failure(k={k})", estimate.value, estimate.stderr)
        report.add_estimate(f"bound(k={k})", bound)
        if estimate.lower(SIGMAS) > bound:
            report.details.append(f"k={k}: estimate above bound")
            ok = False
        if previous is not None:
            if estimate.value > previous.value + SIGMAS * _pooled(previous, estimate):
                report.details.append(f"k={k}: estimate increased")
                ok = False
        previous = estimate
    return _with_status(report, ok)


@_logged_check
def check_loss_decomposition(
    dist: DiscreteDistribution,
    w: UnitVector,
    gamma_i: float,
    k: int,
    draws: int,
    seed: int,
    sample: Optional[Sample] = None,
    gamma: Optional[float] = None,
    executor: Optional[TrialExecutor] = None,
) -> CheckReport:
    """
    Per draw (A, t), the exact identity

        L_D(w) = L^{gamma_i/2}_{AD}(h) + Pr_D[m > gamma_i/2, a <= 0]
                 - Pr_D[m <= gamma_i/2, a > 0]

    and, for a sample, its analogue with L^gamma_S(w) and a <= gamma.
    """
    executor = executor or default_executor()
    gamma = gamma_i if gamma is None else gamma
    cut = gamma_i / 2.0
    alpha_d = margins_of(w, dist.features, dist.labels)
    loss_d = true_loss(w, dist)
    if sample is not None:
        alpha_s = margins_of(w, sample.features, sample.labels)
        loss_s = float(np.mean(alpha_s <= gamma))

    def one_draw(index: int, rng: np.random.Generator) -> float:
        draw = sample_draw(k, dist.dim, rng)
        m = discretized_margins(draw, w, dist.features, dist.labels)
        wts = dist.weights
        rebuilt = (
            np.sum(wts[m <= cut])
            + np.sum(wts[(m > cut) & (alpha_d <= 0.0)])
            - np.sum(wts[(m <= cut) & (alpha_d > 0.0)])
        )
        residual = abs(loss_d - rebuilt)
        if sample is not None:
            m_s = discretized_margins(draw, w, sample.features, sample.labels)
            rebuilt_s = (
                np.mean(m_s <= cut)
                + np.mean((m_s > cut) & (alpha_s <= gamma))
                - np.mean((m_s <= cut) & (alpha_s > gamma))
            )
            residual = max(residual, abs(loss_s - rebuilt_s))
        return float(residual)

    worst = max(executor.map(one_draw, seed, draws), default=0.0)
    report = CheckReport.from_outcome(
        "loss-decomposition", worst <= EXACT_TOLERANCE, draws, seed, threshold=EXACT_TOLERANCE,
        parameters={"gamma_i": gamma_i, "gamma": gamma, "k": k},
    )
    report.add_estimate("max_residual", worst)
    return report
