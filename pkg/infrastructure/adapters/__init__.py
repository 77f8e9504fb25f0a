"""Infrastructure adapters for external dependencies."""

from .csv_report_writer import CsvReportWriter, format_cell
from .yaml_configuration_adapter import YamlConfigurationAdapter

__all__ = ["CsvReportWriter", "YamlConfigurationAdapter", "format_cell"]
