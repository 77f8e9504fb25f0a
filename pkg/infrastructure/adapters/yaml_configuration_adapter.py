"""YAML configuration source."""

import json
from pathlib import Path
from typing import Any, Dict

import yaml

from application.ports.configuration_port import (
    ConfigurationNotFoundError,
    ConfigurationParseError,
    ConfigurationPermissionError,
    ConfigurationPort,
)
from infrastructure.logging.logger_factory import get_module_logger


class YamlConfigurationAdapter(ConfigurationPort):
    """
    Reads and writes experiment documents as YAML.

    Parse failures carry the 1-based line and column reported by the YAML
    scanner.
    """

    def __init__(self):
        self.logger = get_module_logger(__name__)

    def load(self, file_path: Path) -> Dict[str, Any]:
        file_path = Path(file_path)
        if not file_path.exists():
            raise ConfigurationNotFoundError(f"Configuration file not found: {file_path}")
        try:
            text = file_path.read_text(encoding="utf-8")
        except PermissionError as e:
            raise ConfigurationPermissionError(f"Cannot read {file_path}: {e}") from e
        try:
            document = yaml.safe_load(text)
        except yaml.MarkedYAMLError as e:
            mark = e.problem_mark
            raise ConfigurationParseError(
                str(e.problem or e),
                file_path,
                mark.line + 1 if mark else None,
                mark.column + 1 if mark else None,
            ) from e
        except yaml.YAMLError as e:
            raise ConfigurationParseError(str(e), file_path) from e
        if document is None:
            return {}
        if not isinstance(document, dict):
            raise ConfigurationParseError("top level must be a mapping", file_path, 1, 1)
        self.logger.debug("Configuration loaded", {"path": str(file_path)})
        return document

    def dump(self, document: Dict[str, Any], file_path: Path) -> None:
        file_path = Path(file_path)
        try:
            file_path.parent.mkdir(parents=True, exist_ok=True)
            with file_path.open("w", encoding="utf-8") as f:
                yaml.safe_dump(document, f, default_flow_style=False, sort_keys=False)
        except PermissionError as e:
            raise ConfigurationPermissionError(f"Cannot write {file_path}: {e}") from e

    def canonical_text(self, document: Dict[str, Any]) -> str:
        return json.dumps(document, sort_keys=True, separators=(",", ":"), default=str)
