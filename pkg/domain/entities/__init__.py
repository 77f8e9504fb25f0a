"""Domain entities for the margin laboratory."""

from .check_report import CheckReport, CheckStatus

__all__ = ["CheckReport", "CheckStatus"]
