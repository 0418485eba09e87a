"""Custom exceptions raised by :mod:`sicunet.scenario`."""

from __future__ import annotations

from pathlib import Path


class ScenarioError(Exception):
    """Base exception for all errors raised by :mod:`sicunet.scenario`."""


class InvalidScenarioError(ScenarioError, ValueError):
    """Raised when a scenario configuration or generation request is invalid."""


class DatasetFormatError(ScenarioError):
    """Raised when a dataset file cannot be decoded."""

    def __init__(self, path: Path | None, message: str) -> None:
        self.path = path
        location = f"{path}: " if path is not None else ""
        super().__init__(f"{location}{message}")


class DatasetChecksumError(DatasetFormatError):
    """Raised when the stored checksum does not match the file contents."""


class DatasetVersionError(DatasetFormatError):
    """Raised when the dataset was written with an unsupported format version."""


class DatasetTruncatedError(DatasetFormatError):
    """Raised when the dataset file ends before its declared contents."""


class DatasetIOError(ScenarioError, OSError):
    """Raised when a dataset cannot be written to or read from disk."""
