"""Custom exceptions raised by :mod:`sicunet.evaluation`."""

from __future__ import annotations

from pathlib import Path


class EvaluationError(Exception):
    """Base exception for all errors raised by :mod:`sicunet.evaluation`."""


class InvalidMetricInputError(EvaluationError, ValueError):
    """Raised when metric inputs have mismatched lengths or out-of-range values."""


class ReportWriteError(EvaluationError, OSError):
    """Raised when a report artifact cannot be written."""

    def __init__(self, path: Path, message: str) -> None:
        self.path = path
        super().__init__(f"{path}: {message}")


class ReportFormatError(EvaluationError):
    """Raised when a serialised report cannot be decoded."""
