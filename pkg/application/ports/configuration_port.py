"""Port interface for experiment configuration sources."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Optional


class ConfigurationPort(ABC):
    """
    Port interface for reading and writing experiment configuration.

    Implementations return plain mappings; schema validation happens in the
    caller so that every source is checked the same way.
    """

    @abstractmethod
    def load(self, file_path: Path) -> Dict[str, Any]:
        """
        Load a configuration document.

        Args:
            file_path: Path to the configuration file

        Returns:
            Parsed document as a dictionary (empty for an empty file)

        Raises:
            ConfigurationNotFoundError: If the file does not exist
            ConfigurationParseError: If the file is not well formed
        """
        pass

    @abstractmethod
    def dump(self, document: Dict[str, Any], file_path: Path) -> None:
        """
        Write a configuration document so that ``load`` returns it unchanged.

        Raises:
            ConfigurationPermissionError: If the file cannot be written
        """
        pass

    @abstractmethod
    def canonical_text(self, document: Dict[str, Any]) -> str:
        """Deterministic serialisation used for provenance hashing."""
        pass


class ConfigurationError(Exception):
    """Base exception for configuration errors."""
    pass


class ConfigurationNotFoundError(ConfigurationError):
    """Raised when configuration file is not found."""
    pass


class ConfigurationParseError(ConfigurationError):
    """Raised when configuration file cannot be parsed; carries the source position."""

    def __init__(
        self,
        message: str,
        file_path: Optional[Path] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.message = message
        self.file_path = file_path
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        location = str(self.file_path) if self.file_path is not None else "<config>"
        if self.line is not None:
            location += f":{self.line}"
            if self.column is not None:
                location += f":{self.column}"
        return f"{location}: {self.message}"


class ConfigurationPermissionError(ConfigurationError):
    """Raised when configuration file permissions are insufficient."""
    pass
