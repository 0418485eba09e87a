"""Custom exceptions raised by :mod:`sicunet.models`."""

from __future__ import annotations


class ModelError(Exception):
    """Base exception for all errors raised by :mod:`sicunet.models`."""


class InvalidFrameError(ModelError, ValueError):
    """Raised when a frame cannot be fed to a model."""


class ModelLoadError(ModelError):
    """Raised when a checkpoint or bank manifest cannot be loaded."""


class ModelBankError(ModelError):
    """Raised when the U-Net bank lacks an entry or is incomplete."""


class UnsupportedClassCountError(ModelError, ValueError):
    """Raised when a classifier is requested with a class count no stage uses."""
