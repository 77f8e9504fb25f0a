"""Logging presets for the margin laboratory."""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

DEFAULT_LOG_FILE = Path("logs/marginlab.log")


class LogLevel(Enum):
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class LogFormat(Enum):
    JSON = "json"
    TEXT = "text"
    RICH = "rich"


@dataclass
class LogConfig:
    """
    Where log records go and how they look.

    Console output is always stderr; standard output is reserved for result
    tables.
    """

    level: LogLevel = LogLevel.INFO
    format: LogFormat = LogFormat.TEXT
    log_file: Optional[Path] = None
    max_file_size_mb: int = 100
    backup_count: int = 5
    enable_console: bool = True
    enable_file: bool = False
    enable_structured: bool = False
    include_timestamp: bool = True
    include_line_number: bool = False

    @classmethod
    def development(cls) -> "LogConfig":
        """Rich console output with source locations."""
        return cls(format=LogFormat.RICH, include_line_number=True)

    @classmethod
    def production(cls) -> "LogConfig":
        """JSON records on stderr and in a rotating file, for long unattended sweeps."""
        return cls(
            format=LogFormat.JSON,
            enable_file=True,
            enable_structured=True,
            log_file=DEFAULT_LOG_FILE,
        )

    @classmethod
    def testing(cls) -> "LogConfig":
        """Warnings and above only, and nothing on the console."""
        return cls(level=LogLevel.WARNING, enable_console=False)

    @classmethod
    def for_environment(cls, environment: Optional[str]) -> "LogConfig":
        """Preset named by ``environment``; unknown names get development."""
        presets = {
            "production": cls.production,
            "testing": cls.testing,
        }
        return presets.get((environment or "").lower(), cls.development)()

    def get_python_log_level(self) -> int:
        return getattr(logging, self.level.value)

    def create_log_directory(self) -> None:
        if self.log_file:
            self.log_file.parent.mkdir(parents=True, exist_ok=True)

    def validate(self) -> list[str]:
        """Problems that would stop handlers from being built; empty when usable."""
        problems = [
            (self.max_file_size_mb <= 0, "log rotation size must be positive"),
            (self.backup_count < 0, "log backup count cannot be negative"),
            (self.enable_file and self.log_file is None, "file logging needs a log_file"),
        ]
        return [message for failed, message in problems if failed]
