"""Command implementations: configuration in, result rows out."""

import itertools
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from rich.console import Console
from rich.table import Table

from application.services.bounds import evaluate_all
from application.services.learn import (
    GAP_METRICS,
    LearnerConfig,
    gap_vs_bounds,
    summarize_gap_rows,
)
from application.services.lowerbound import (
    WitnessGeometry,
    disjoint_probability_lower_bound,
    gap_experiment,
    gamma_level,
    witness_geometry,
)
from domain.entities.check_report import CheckReport, CheckStatus
from domain.value_objects.bound_inputs import BoundInputs, BoundKind
from domain.value_objects.lower_bound_config import LowerBoundConfig, WitnessSpec
from infrastructure.logging.logger_factory import get_module_logger
from infrastructure.parallel.trial_executor import TrialExecutor

from .checks import get_check
from .config import BoundsSweepConfig, GapRunConfig, LowerBoundRunConfig, VerifyConfig

logger = get_module_logger(__name__)
console = Console(stderr=True)

BOUND_NAMES = [kind.value for kind in BoundKind]
BOUNDS_COLUMNS = ["gamma", "n", "delta", "loss"] + BOUND_NAMES
VERIFY_COLUMNS = [
    "check", "status", "quantity", "estimate", "stderr", "threshold", "trials", "seed", "details",
]
LOWERBOUND_COLUMNS = [
    "trial", "margin", "empirical_margin_loss", "true_loss", "gap", "tau", "disjoint",
]
GAP_SUMMARY_COLUMNS = ["quantile"] + GAP_METRICS + ["coverage"]
GAP_TRIAL_COLUMNS = (
    ["trial", "empirical_margin_loss", "true_loss", "gap"] + BOUND_NAMES + ["converged", "covered"]
)

DEFAULT_LOWERBOUND_TRIALS = 100
DEFAULT_GAP_TRIALS = 100

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2


@dataclass
class CommandResult:
    columns: List[str]
    rows: List[Dict[str, Any]]
    exit_code: int = EXIT_PASS


def run_bounds(cfg: BoundsSweepConfig) -> CommandResult:
    """One row per (gamma, n, delta, loss) grid point; blank cells where a precondition fails."""
    rows = []
    skipped = 0
    constants = cfg.bound_constants()
    for gamma, n, delta, loss in itertools.product(cfg.gammas, cfg.ns, cfg.deltas, cfg.losses):
        inputs = BoundInputs(gamma=gamma, n=n, delta=delta, empirical_loss=loss, c=cfg.c)
        values = evaluate_all(
            inputs, constants, tau=cfg.tau, rademacher=cfg.rademacher,
            range_constant=cfg.range_constant,
        )
        skipped += sum(value is None for value in values.values())
        rows.append({
            "gamma": gamma, "n": n, "delta": delta, "loss": loss,
            **{kind.value: value for kind, value in values.items()},
        })
    logger.log_sweep(len(rows), skipped)
    return CommandResult(BOUNDS_COLUMNS, rows)


def verify_exit_code(reports: Sequence[CheckReport]) -> int:
    """1 if any check failed, else 2 if any was inconclusive, else 0."""
    statuses = {report.status for report in reports}
    if CheckStatus.FAIL in statuses:
        return EXIT_FAIL
    if CheckStatus.INCONCLUSIVE in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def run_verify(
    cfg: VerifyConfig,
    seed: int,
    executor: TrialExecutor,
    trials: Optional[int] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> Tuple[CommandResult, List[CheckReport]]:
    """Run every named check under the master seed; unknown names fail before anything runs."""
    entries = [get_check(name) for name in cfg.checks]
    reports = []
    for entry in entries:
        params = {**cfg.params.get(entry.name, {}), **(overrides or {})}
        reports.append(
            entry.run(seed, executor, trials=trials, params=params, spec=cfg.distribution)
        )
    rows = [row for report in reports for row in report.to_rows()]
    return CommandResult(VERIFY_COLUMNS, rows, verify_exit_code(reports)), reports


def print_check_summary(reports: Sequence[CheckReport]) -> None:
    table = Table(title="Verification checks")
    table.add_column("Check")
    table.add_column("Status")
    table.add_column("Trials", justify="right")
    table.add_column("Threshold", justify="right")
    colours = {
        CheckStatus.PASS: "green",
        CheckStatus.FAIL: "red",
        CheckStatus.INCONCLUSIVE: "yellow",
    }
    for report in reports:
        status = f"[{colours[report.status]}]{report.status.value}[/{colours[report.status]}]"
        threshold = "" if report.threshold is None else f"{report.threshold:.4g}"
        table.add_row(report.name, status, str(report.trials), threshold)
    console.print(table)


def lowerbound_preflight(cfg: LowerBoundRunConfig) -> Tuple[LowerBoundConfig, WitnessGeometry]:
    """Exact geometry of the witness for T = the first 2^i points of the level."""
    construction = LowerBoundConfig.of(cfg.taus)
    spec = WitnessSpec(cfg.level, tuple(range(2 ** cfg.level)))
    return construction, witness_geometry(construction, spec)


def print_lowerbound_preflight(
    cfg: LowerBoundRunConfig, construction: LowerBoundConfig, geometry: WitnessGeometry
) -> None:
    table = Table(title="Lower-bound construction")
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    table.add_row("k", str(construction.k))
    table.add_row("m", str(construction.m))
    table.add_row("dimension", str(construction.dimension))
    table.add_row("gamma_i", repr(gamma_level(cfg.level)))
    table.add_row("| ||w|| - 1 |", f"{geometry.norm_error:.3e}")
    table.add_row("max |<w,x> - gamma_i|, x not in T", f"{geometry.max_deviation:.3e}")
    table.add_row("max <w,x>, x in T", repr(geometry.max_member_margin))
    table.add_row(
        "Pr[S misses T] lower bound",
        f"{disjoint_probability_lower_bound(construction, cfg.level, cfg.n):.6g}",
    )
    console.print(table)


def run_lowerbound(
    cfg: LowerBoundRunConfig, seed: int, executor: TrialExecutor, trials: Optional[int] = None
) -> CommandResult:
    construction = LowerBoundConfig.of(cfg.taus)
    trials = DEFAULT_LOWERBOUND_TRIALS if trials is None else trials
    rows = gap_experiment(
        construction, cfg.level, cfg.n, trials, seed, strict=cfg.strict, executor=executor
    )
    return CommandResult(LOWERBOUND_COLUMNS, [row.to_dict() for row in rows])


def _blank_missing(records: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    return [
        {key: None if isinstance(value, float) and math.isnan(value) else value
         for key, value in record.items()}
        for record in records
    ]


def run_gap(
    cfg: GapRunConfig, seed: int, executor: TrialExecutor, trials: Optional[int] = None
) -> CommandResult:
    """Quantile rows of the learned-hypothesis gap, or one row per trial with ``per_trial``."""
    trials = DEFAULT_GAP_TRIALS if trials is None else trials
    dist, _ = cfg.distribution.build()
    learner = LearnerConfig(target_margin=cfg.gamma, max_epochs=cfg.max_epochs, seed=seed)
    rows = gap_vs_bounds(
        dist, cfg.n, cfg.gamma, cfg.delta, trials, seed,
        learner=learner, constants=cfg.bound_constants(), executor=executor,
    )
    if cfg.per_trial:
        return CommandResult(GAP_TRIAL_COLUMNS, [row.to_dict() for row in rows])
    summary = summarize_gap_rows(rows, cfg.quantiles)
    return CommandResult(GAP_SUMMARY_COLUMNS, _blank_missing(summary.to_dict("records")))
