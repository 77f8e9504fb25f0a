"""Process-wide registry of structured loggers."""

import os
from typing import Dict, Optional

from .log_config import LogConfig
from .structured_logger import StructuredLogger

ENVIRONMENT_VARIABLE = "MBL_ENV"


class LoggerFactory:
    """
    Singleton holding one StructuredLogger per module name.

    Services ask for their logger at import time, before any command has
    configured logging, so the first request falls back to the ``MBL_ENV``
    preset. ``update_config`` later rebuilds handlers in place.
    """

    _instance: Optional["LoggerFactory"] = None
    _loggers: Dict[str, StructuredLogger] = {}
    _config: Optional[LogConfig] = None

    def __new__(cls) -> "LoggerFactory":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    @classmethod
    def initialize(cls, config: Optional[LogConfig] = None) -> "LoggerFactory":
        """
        Raises:
            ValueError: If the configuration does not validate
        """
        factory = cls()
        factory.update_config(config or cls._environment_config())
        return factory

    @staticmethod
    def _environment_config() -> LogConfig:
        return LogConfig.for_environment(os.getenv(ENVIRONMENT_VARIABLE))

    def get_logger(self, name: str) -> StructuredLogger:
        if LoggerFactory._config is None:
            LoggerFactory._config = self._environment_config()

        if name not in self._loggers:
            self._loggers[name] = StructuredLogger(name, LoggerFactory._config)

        return self._loggers[name]

    def get_logger_for_module(self, module_name: str) -> StructuredLogger:
        """Loggers are keyed by the last dotted component of the module name."""
        return self.get_logger(module_name.rsplit(".", 1)[-1])

    def update_config(self, config: LogConfig) -> None:
        """Swap the configuration; existing loggers keep their identity and get new handlers."""
        errors = config.validate()
        if errors:
            raise ValueError(f"Invalid logging configuration: {errors}")

        LoggerFactory._config = config
        for logger in self._loggers.values():
            logger.reconfigure(config)

    def shutdown(self) -> None:
        """Close every handler; registered loggers get new ones on the next ``initialize``."""
        for logger in self._loggers.values():
            logger.close()

        LoggerFactory._config = None


def get_logger(name: str) -> StructuredLogger:
    return LoggerFactory().get_logger(name)


def get_module_logger(module_name: str) -> StructuredLogger:
    """Logger for ``__name__`` of the calling module."""
    return LoggerFactory().get_logger_for_module(module_name)


def initialize_logging(config: Optional[LogConfig] = None) -> LoggerFactory:
    return LoggerFactory.initialize(config)
