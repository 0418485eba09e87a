"""Classical successive interference cancellation."""

from __future__ import annotations

from .cancel import SicConfig, SicResult, reconstruct_interferer, scale_for_cancellation, sic_cancel
from .exceptions import InvalidSicInputError, SicError

__all__ = [
    "InvalidSicInputError",
    "SicConfig",
    "SicError",
    "SicResult",
    "reconstruct_interferer",
    "scale_for_cancellation",
    "sic_cancel",
]
