"""Dependency container for the margin bound lab."""

from pathlib import Path
from typing import Optional, TextIO, Union

from infrastructure.adapters.csv_report_writer import CsvReportWriter
from infrastructure.logging.log_config import LogConfig
from infrastructure.logging.logger_factory import LoggerFactory, initialize_logging
from infrastructure.parallel.trial_executor import TrialExecutor, set_default_executor

from .app_config import LabConfig

LOG_FILE_NAME = "marginlab.log"


class LabContainer:
    """
    Wires the lab configuration to logging, the trial executor and the
    report writer. Everything is built lazily on first request.
    """

    def __init__(self, config: Optional[LabConfig] = None):
        self._config = config or LabConfig.from_env()
        self._logger_factory: Optional[LoggerFactory] = None
        self._executor: Optional[TrialExecutor] = None

    def initialize(self) -> None:
        """
        Validate the lab configuration and install its logging preset; idempotent.

        Raises:
            ValueError: If the configuration does not validate
        """
        if self._logger_factory is not None:
            return

        problems = self._config.validate()
        if problems:
            raise ValueError(f"Invalid configuration: {problems}")

        self._logger_factory = initialize_logging(self._log_config())

    def _log_config(self) -> LogConfig:
        log_config = LogConfig.for_environment(self._config.environment)
        log_config.level = self._config.log_level
        if self._config.log_format is not None:
            log_config.format = self._config.log_format
        if log_config.enable_file:
            log_config.log_file = self._config.logs_dir / LOG_FILE_NAME
        return log_config

    @property
    def config(self) -> LabConfig:
        return self._config

    @property
    def logger_factory(self) -> LoggerFactory:
        self.initialize()
        assert self._logger_factory is not None
        return self._logger_factory

    def get_executor(self) -> TrialExecutor:
        """Executor sized by the configured thread count; installed as the process default."""
        self.initialize()
        if self._executor is None:
            self._executor = TrialExecutor(self._config.resolved_threads())
            set_default_executor(self._executor)
        return self._executor

    def get_report_writer(
        self, destination: Union[Path, str, TextIO, None] = None
    ) -> CsvReportWriter:
        return CsvReportWriter(destination)

    def shutdown(self) -> None:
        """Close log handlers and forget the executor; ``initialize`` may be called again."""
        if self._logger_factory is not None:
            self._logger_factory.shutdown()
        self._logger_factory = None
        self._executor = None


_container: Optional[LabContainer] = None


def create_container(config: Optional[LabConfig] = None) -> LabContainer:
    """The process-wide container, created and initialized on the first call."""
    global _container
    if _container is None:
        container = LabContainer(config)
        container.initialize()
        _container = container
    return _container


def get_container() -> LabContainer:
    """
    Raises:
        RuntimeError: If ``create_container`` has not been called
    """
    if _container is None:
        raise RuntimeError("No lab container; call create_container() first")
    return _container


def reset_container() -> None:
    """Shut down and drop the process-wide container."""
    global _container
    if _container is not None:
        _container.shutdown()
    _container = None
