"""Custom exceptions raised by :mod:`sicunet.sic`."""

from __future__ import annotations


class SicError(Exception):
    """Base exception for all errors raised by :mod:`sicunet.sic`."""


class InvalidSicInputError(SicError, ValueError):
    """Raised when a mixture or configuration cannot be processed by SIC."""
