"""Command-line entry point: ``marginlab bounds | verify | lowerbound | gap | checks``."""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from rich.console import Console
from rich.table import Table

from application.ports.configuration_port import ConfigurationError
from application.ports.report_writer_port import Provenance, ReportWriteError
from domain.errors import MarginLabError
from infrastructure.config.app_config import LabConfig
from infrastructure.config.dependency_injection import (
    LabContainer,
    create_container,
    reset_container,
)
from infrastructure.logging.structured_logger import set_run_id
from infrastructure.parallel.trial_executor import resolve_threads

from . import __version__
from .checks import CHECKS
from .config import ExperimentConfig, config_hash, load_experiment_config
from .runner import (
    CommandResult,
    EXIT_FAIL,
    print_check_summary,
    print_lowerbound_preflight,
    lowerbound_preflight,
    run_bounds,
    run_gap,
    run_lowerbound,
    run_verify,
)

console = Console(stderr=True)

EXIT_USAGE = 64


class UsageError(Exception):
    """Bad command-line input detected after argument parsing."""


class _Parser(argparse.ArgumentParser):
    """argparse with the usage-error exit code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_param(text: str) -> Dict[str, Any]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got '{text}'")
    return {key: yaml.safe_load(raw)}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="Experiment YAML file")
    common.add_argument("--seed", type=int, default=None, help="Master seed (unsigned 64-bit)")
    common.add_argument("--out", default=None, help="Output CSV path (default stdout)")
    common.add_argument("--trials", type=int, default=None, help="Trial or sample count")
    common.add_argument(
        "--threads", type=int, default=None,
        help="Worker threads; affects speed only (fallback MBL_THREADS)",
    )
    return common


def _apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    updates: Dict[str, Any] = {"command": args.command}
    for name in ("seed", "trials", "out", "threads"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value

    if args.command == "bounds":
        section = {
            field: getattr(args, field)
            for field in ("gammas", "ns", "deltas", "losses")
            if getattr(args, field) is not None
        }
        if section:
            updates["bounds"] = config.bounds.model_copy(update=section)
    elif args.command == "verify" and args.check:
        updates["verify"] = config.verify.model_copy(update={"checks": args.check})
    elif args.command == "lowerbound":
        section = {
            field: getattr(args, field)
            for field in ("taus", "level", "n")
            if getattr(args, field) is not None
        }
        if args.strict:
            section["strict"] = True
        if section:
            updates["lowerbound"] = config.lowerbound.model_copy(update=section)
    elif args.command == "gap":
        section = {
            field: getattr(args, field)
            for field in ("n", "gamma", "delta")
            if getattr(args, field) is not None
        }
        if args.per_trial:
            section["per_trial"] = True
        if section:
            updates["gap"] = config.gap.model_copy(update=section)

    merged = config.model_dump()
    for key, value in updates.items():
        merged[key] = value.model_dump() if hasattr(value, "model_dump") else value
    return ExperimentConfig.model_validate(merged)


def _container(config: ExperimentConfig) -> LabContainer:
    lab = LabConfig.from_env()
    lab.threads = resolve_threads(config.threads)
    return create_container(lab)


def _emit(
    container: LabContainer, config: ExperimentConfig, result: CommandResult
) -> int:
    provenance = Provenance(
        version=__version__,
        command=config.command or "",
        seed=config.seed,
        config_sha256=config_hash(config),
    )
    container.get_report_writer(config.out).write(result.columns, result.rows, provenance)
    return result.exit_code


def cmd_bounds(config: ExperimentConfig, args: argparse.Namespace) -> int:
    container = _container(config)
    return _emit(container, config, run_bounds(config.bounds))


def cmd_verify(config: ExperimentConfig, args: argparse.Namespace) -> int:
    container = _container(config)
    overrides: Dict[str, Any] = {}
    for param in args.param or []:
        overrides.update(param)
    try:
        result, reports = run_verify(
            config.verify, config.seed, container.get_executor(), config.trials, overrides
        )
    except TypeError as e:
        raise UsageError(str(e)) from e
    print_check_summary(reports)
    return _emit(container, config, result)


def cmd_lowerbound(config: ExperimentConfig, args: argparse.Namespace) -> int:
    container = _container(config)
    construction, geometry = lowerbound_preflight(config.lowerbound)
    print_lowerbound_preflight(config.lowerbound, construction, geometry)
    result = run_lowerbound(
        config.lowerbound, config.seed, container.get_executor(), config.trials
    )
    return _emit(container, config, result)


def cmd_gap(config: ExperimentConfig, args: argparse.Namespace) -> int:
    container = _container(config)
    result = run_gap(config.gap, config.seed, container.get_executor(), config.trials)
    return _emit(container, config, result)


def cmd_checks(config: Optional[ExperimentConfig], args: argparse.Namespace) -> int:
    table = Table(title="Registered checks")
    table.add_column("Name")
    table.add_column("Trials option")
    table.add_column("Description")
    for entry in CHECKS.values():
        table.add_row(entry.name, entry.trials_keyword or "", entry.summary)
    Console().print(table)
    return 0


def _floats(text: str) -> List[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    p = _Parser(prog="marginlab", description="Numerical lab for margin generalization bounds")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s1 = sub.add_parser("bounds", parents=[common], help="Tabulate the six bounds over a grid")
    s1.add_argument("--gammas", type=_floats, default=None, help="Comma-separated margins")
    s1.add_argument("--ns", type=_floats, default=None, help="Comma-separated sample sizes")
    s1.add_argument("--deltas", type=_floats, default=None, help="Comma-separated deltas")
    s1.add_argument("--losses", type=_floats, default=None, help="Comma-separated margin losses")
    s1.set_defaults(func=cmd_bounds)

    s2 = sub.add_parser("verify", parents=[common], help="Run numerical verification checks")
    s2.add_argument("--check", action="append", default=None, help="Check name (repeatable)")
    s2.add_argument(
        "--param", action="append", type=_parse_param, default=None,
        help="KEY=VALUE override passed to every selected check",
    )
    s2.set_defaults(func=cmd_verify)

    s3 = sub.add_parser("lowerbound", parents=[common], help="Hard-distribution gap experiment")
    s3.add_argument("--taus", type=_floats, default=None, help="Comma-separated tau_i")
    s3.add_argument("--level", type=int, default=None, help="Level i")
    s3.add_argument("--n", type=int, default=None, help="Sample size")
    s3.add_argument("--strict", action="store_true", help="Evaluate the margin loss at gamma_i")
    s3.set_defaults(func=cmd_lowerbound)

    s4 = sub.add_parser("gap", parents=[common], help="Learned-hypothesis gap against the bounds")
    s4.add_argument("--n", type=int, default=None, help="Sample size")
    s4.add_argument("--gamma", type=float, default=None, help="Training and evaluation margin")
    s4.add_argument("--delta", type=float, default=None, help="Failure probability")
    s4.add_argument("--per-trial", action="store_true", help="One row per trial, no quantiles")
    s4.set_defaults(func=cmd_gap)

    s5 = sub.add_parser("checks", help="List registered check names")
    s5.set_defaults(func=cmd_checks)

    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "checks":
        return cmd_checks(None, args)

    try:
        config = load_experiment_config(args.config) if args.config else ExperimentConfig()
        if args.seed is None and "seed" not in config.model_fields_set:
            # MBL_SEED stands in for a master seed given nowhere else
            config = config.model_copy(update={"seed": LabConfig.from_env().seed})
        config = _apply_overrides(config, args)
    except ConfigurationError as e:
        console.print(str(e), markup=False)
        return EXIT_FAIL
    except ValueError as e:
        console.print(f"usage error: {e}", markup=False)
        return EXIT_USAGE

    set_run_id()
    try:
        return args.func(config, args)
    except (ConfigurationError, ReportWriteError) as e:
        console.print(str(e), markup=False)
        return EXIT_FAIL
    except (MarginLabError, UsageError, ValueError) as e:
        console.print(f"error: {e}", markup=False)
        return EXIT_USAGE
    finally:
        reset_container()
