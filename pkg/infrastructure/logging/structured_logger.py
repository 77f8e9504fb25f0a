"""Structured logger implementation for the margin laboratory."""

import json
import logging
import sys
import traceback
import uuid
from contextvars import ContextVar
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.logging import RichHandler

from .log_config import LogConfig, LogFormat

# Context variable for the id of the current experiment run
run_id_var: ContextVar[Optional[str]] = ContextVar("run_id", default=None)

# Attributes owned by logging.LogRecord; extra fields must not shadow them
_RESERVED = {
    "name", "msg", "args", "levelname", "levelno", "pathname", "filename", "module",
    "exc_info", "exc_text", "stack_info", "lineno", "funcName", "created", "msecs",
    "relativeCreated", "thread", "threadName", "processName", "process", "message",
    "taskName",
}


class StructuredLogger:
    """
    Structured logger that attaches run ids and event fields to records.

    Event helpers (``log_check_start`` and friends) keep the field names of
    recurring events consistent across services.
    """

    def __init__(self, name: str, config: LogConfig):
        self.name = name
        self.logger = logging.getLogger(f"marginlab.{name}")
        self.logger.propagate = False
        self.config = config
        if not self.logger.handlers:
            self.reconfigure(config)

    def reconfigure(self, config: LogConfig) -> None:
        """Replace every handler with ones built from ``config``."""
        self.close()
        self.config = config
        level = config.get_python_log_level()
        self.logger.setLevel(level)
        for handler in self._build_handlers():
            handler.setLevel(level)
            self.logger.addHandler(handler)

    def close(self) -> None:
        for handler in self.logger.handlers[:]:
            handler.close()
            self.logger.removeHandler(handler)

    def _build_handlers(self) -> List[logging.Handler]:
        handlers: List[logging.Handler] = []
        if self.config.enable_console:
            if self.config.format == LogFormat.RICH:
                handlers.append(RichHandler(
                    console=Console(stderr=True),
                    show_time=self.config.include_timestamp,
                    show_path=self.config.include_line_number,
                ))
            else:
                stream = logging.StreamHandler(sys.stderr)
                stream.setFormatter(self._formatter())
                handlers.append(stream)

        if self.config.enable_file and self.config.log_file:
            self.config.create_log_directory()
            rotating = RotatingFileHandler(
                self.config.log_file,
                maxBytes=self.config.max_file_size_mb * 1024 * 1024,
                backupCount=self.config.backup_count,
            )
            rotating.setFormatter(self._formatter())
            handlers.append(rotating)

        return handlers or [logging.NullHandler()]

    def _formatter(self) -> logging.Formatter:
        if self.config.format == LogFormat.JSON:
            return JsonFormatter()
        return TextFormatter(self.config)

    def _build_log_record(
        self,
        level: str,
        message: str,
        extra: Optional[Dict[str, Any]] = None,
        exc_info: Optional[BaseException] = None,
    ) -> Dict[str, Any]:
        """Build structured log record."""
        record: Dict[str, Any] = {"message": message, "level": level, "logger": self.name}

        if self.config.include_timestamp:
            record["timestamp"] = datetime.now(timezone.utc).isoformat()

        run_id = run_id_var.get()
        if run_id:
            record["run_id"] = run_id

        if exc_info:
            record["exception"] = {
                "type": type(exc_info).__name__,
                "message": str(exc_info),
                "traceback": traceback.format_exception(
                    type(exc_info), exc_info, exc_info.__traceback__
                ),
            }

        if extra:
            record.update(extra)

        return record

    def _log(
        self,
        level: int,
        message: str,
        extra: Optional[Dict[str, Any]] = None,
        exc_info: Optional[BaseException] = None,
    ) -> None:
        if not self.logger.isEnabledFor(level):
            return
        record = self._build_log_record(logging.getLevelName(level), message, extra, exc_info)
        safe_extra = {
            k: v for k, v in record.items() if k not in _RESERVED and k not in {"level", "logger"}
        }
        text = json.dumps(record, default=str) if self.config.enable_structured else message
        self.logger.log(level, text, extra=safe_extra)

    def debug(self, message: str, extra: Optional[Dict[str, Any]] = None) -> None:
        """Log debug message."""
        self._log(logging.DEBUG, message, extra)

    def info(self, message: str, extra: Optional[Dict[str, Any]] = None) -> None:
        """Log info message."""
        self._log(logging.INFO, message, extra)

    def warning(self, message: str, extra: Optional[Dict[str, Any]] = None) -> None:
        """Log warning message."""
        self._log(logging.WARNING, message, extra)

    def error(
        self,
        message: str,
        extra: Optional[Dict[str, Any]] = None,
        exc_info: Optional[BaseException] = None,
    ) -> None:
        """Log error message."""
        self._log(logging.ERROR, message, extra, exc_info)

    def log_check_start(self, check: str, seed: int, trials: int) -> None:
        """Log verification check start event."""
        self.info(f"Check started: {check}", {
            "event": "check_start",
            "check": check,
            "seed": seed,
            "trials": trials,
        })

    def log_check_complete(self, check: str, status: str, duration_ms: int) -> None:
        """Log verification check completion event."""
        self.info(f"Check {check}: {status}", {
            "event": "check_complete",
            "check": check,
            "status": status,
            "duration_ms": duration_ms,
        })

    def log_experiment(self, experiment: str, trials: int, duration_ms: int) -> None:
        """Log completion of a trial-based experiment."""
        self.info(f"Experiment {experiment} finished", {
            "event": "experiment_complete",
            "experiment": experiment,
            "trials": trials,
            "duration_ms": duration_ms,
        })

    def log_sweep(self, rows: int, skipped_cells: int) -> None:
        """Log a bound-table sweep."""
        self.info(f"Bound sweep produced {rows} rows", {
            "event": "bound_sweep",
            "rows": rows,
            "skipped_cells": skipped_cells,
        })


class JsonFormatter(logging.Formatter):
    """One JSON object per record, including every extra field."""

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        payload.update(
            (key, value) for key, value in vars(record).items()
            if key not in _RESERVED and key not in payload
        )
        return json.dumps(payload, default=str)


class TextFormatter(logging.Formatter):
    """``time - LEVEL - logger[:line] - message``."""

    def __init__(self, config: LogConfig):
        where = "%(name)s:%(lineno)d" if config.include_line_number else "%(name)s"
        parts = ["%(levelname)s", where, "%(message)s"]
        if config.include_timestamp:
            parts.insert(0, "%(asctime)s")
        super().__init__(" - ".join(parts))


def set_run_id(run_id: Optional[str] = None) -> str:
    """Set the run id for the current context."""
    if run_id is None:
        run_id = uuid.uuid4().hex[:12]
    run_id_var.set(run_id)
    return run_id


def get_run_id() -> Optional[str]:
    """Get the current run id."""
    return run_id_var.get()


def clear_run_id() -> None:
    """Clear the run id from the current context."""
    run_id_var.set(None)
