"""Port interface for tabular result output."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence


@dataclass(frozen=True)
class Provenance:
    """What produced a result file: tool version, command, seed and config digest."""

    version: str
    command: str
    seed: Optional[int] = None
    config_sha256: Optional[str] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def lines(self) -> List[str]:
        entries = [("version", self.version), ("command", self.command)]
        if self.seed is not None:
            entries.append(("seed", self.seed))
        if self.config_sha256 is not None:
            entries.append(("config_sha256", self.config_sha256))
        entries.extend(self.extra.items())
        return [f"{key}={value}" for key, value in entries]


class ReportWriterPort(ABC):
    """
    Port interface for writing result tables.

    Column order is given explicitly; a row missing a column or holding
    None for it is written as an empty cell.
    """

    @abstractmethod
    def write(
        self,
        columns: Sequence[str],
        rows: Sequence[Mapping[str, Any]],
        provenance: Optional[Provenance] = None,
    ) -> None:
        """
        Write one table.

        Raises:
            ReportWriteError: If the destination cannot be written
        """
        pass


class ReportWriteError(Exception):
    """Raised when a result table cannot be written."""
    pass
