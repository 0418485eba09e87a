"""Custom exceptions raised by :mod:`sicunet.pipeline`."""

from __future__ import annotations


class PipelineError(Exception):
    """Base exception for all errors raised by :mod:`sicunet.pipeline`."""


class PipelineConfigurationError(PipelineError, ValueError):
    """Raised when models, bank or overrides do not fit the configured scenario."""
