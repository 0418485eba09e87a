"""Custom exceptions raised by :mod:`sicunet.dsp`."""

from __future__ import annotations


class DspError(Exception):
    """Base exception for all errors raised by :mod:`sicunet.dsp`."""


class InvalidSignalError(DspError, ValueError):
    """Raised when a signal, bit sequence or filter parameter is invalid."""
