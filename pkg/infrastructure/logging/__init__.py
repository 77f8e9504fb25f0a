"""Logging infrastructure for the margin laboratory."""

from .log_config import LogConfig, LogFormat, LogLevel
from .logger_factory import LoggerFactory, get_logger, get_module_logger, initialize_logging
from .structured_logger import StructuredLogger, clear_run_id, get_run_id, set_run_id

__all__ = [
    "LogConfig",
    "LogFormat",
    "LogLevel",
    "LoggerFactory",
    "StructuredLogger",
    "clear_run_id",
    "get_logger",
    "get_module_logger",
    "get_run_id",
    "initialize_logging",
    "set_run_id",
]
