"""CSV report writer with '#' provenance lines."""

import csv
import sys
from numbers import Integral, Real
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, TextIO, Union

from application.ports.report_writer_port import Provenance, ReportWriteError, ReportWriterPort
from infrastructure.logging.logger_factory import get_module_logger

STDOUT = "-"


def format_cell(value: Any) -> str:
    """Floats round-trip through repr; None is an empty cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Integral):
        return str(int(value))
    if isinstance(value, Real):
        return repr(float(value))
    return str(value)


class CsvReportWriter(ReportWriterPort):
    """
    Writes one comma-separated table with LF line endings.

    ``destination`` is a file path, ``"-"``/None for standard output, or an
    open text stream.
    """

    def __init__(self, destination: Union[Path, str, TextIO, None] = None):
        self.destination = destination
        self.logger = get_module_logger(__name__)

    def write(
        self,
        columns: Sequence[str],
        rows: Sequence[Mapping[str, Any]],
        provenance: Optional[Provenance] = None,
    ) -> None:
        if self.destination is None or self.destination == STDOUT:
            self._write_stream(sys.stdout, columns, rows, provenance)
        elif hasattr(self.destination, "write"):
            stream = self.destination
            self._write_stream(stream, columns, rows, provenance)  # type: ignore[arg-type]
        else:
            path = Path(self.destination)  # type: ignore[arg-type]
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                with path.open("w", newline="", encoding="utf-8") as f:
                    self._write_stream(f, columns, rows, provenance)
            except OSError as e:
                raise ReportWriteError(f"Cannot write report to {path}: {e}") from e
            self.logger.info("Report written", {"path": str(path), "rows": len(rows)})

    @staticmethod
    def _write_stream(
        stream: TextIO,
        columns: Sequence[str],
        rows: Sequence[Mapping[str, Any]],
        provenance: Optional[Provenance],
    ) -> None:
        if provenance is not None:
            for line in provenance.lines():
                stream.write(f"# {line}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row.get(column)) for column in columns])
        stream.flush()
