"""Custom exceptions raised by :mod:`sicunet.nn`."""

from __future__ import annotations

from pathlib import Path


class NnError(Exception):
    """Base exception for all errors raised by :mod:`sicunet.nn`."""


class InvalidTensorError(NnError, ValueError):
    """Raised when tensor shapes, values or labels violate an operation's contract."""


class MissingContextError(NnError, RuntimeError):
    """Raised when a backward pass runs without the context of a matching forward pass."""


class CheckpointError(NnError):
    """Raised when a checkpoint cannot be written, read or verified."""

    def __init__(self, path: Path | None, message: str) -> None:
        self.path = path
        location = f"{path}: " if path is not None else ""
        super().__init__(f"{location}{message}")


class CheckpointVersionError(CheckpointError):
    """Raised when a checkpoint uses an unsupported format version."""
