"""Port interfaces for external dependencies."""

from .configuration_port import (
    ConfigurationError,
    ConfigurationNotFoundError,
    ConfigurationParseError,
    ConfigurationPermissionError,
    ConfigurationPort,
)
from .report_writer_port import Provenance, ReportWriteError, ReportWriterPort

__all__ = [
    "ConfigurationPort",
    "ConfigurationError",
    "ConfigurationNotFoundError",
    "ConfigurationParseError",
    "ConfigurationPermissionError",
    "Provenance",
    "ReportWriterPort",
    "ReportWriteError",
]
