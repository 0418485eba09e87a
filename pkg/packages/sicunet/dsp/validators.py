"""Validation helpers for the :mod:`sicunet.dsp` package."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidSignalError
from .types import BitArray, ComplexArray, IqFrame


def validate_bits(bits: npt.ArrayLike) -> BitArray:
    """Return ``bits`` as a ``uint8`` array after checking QPSK constraints.

    Raises:
        InvalidSignalError: If the sequence holds values other than 0/1 or
            has an odd length.
    """

    array = np.asarray(bits).reshape(-1)
    if array.size and not np.all((array == 0) | (array == 1)):
        raise InvalidSignalError("Bit sequences may only contain 0 and 1")
    if array.size % 2:
        raise InvalidSignalError(f"QPSK needs an even number of bits, got {array.size}")
    return array.astype(np.uint8)


def as_samples(frame: IqFrame | npt.ArrayLike) -> ComplexArray:
    """Return the complex samples held by ``frame``.

    Plain arrays are accepted so that callers can pass intermediate buffers
    without wrapping them first.
    """

    if isinstance(frame, IqFrame):
        return frame.samples
    samples = np.asarray(frame, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(samples)):
        raise InvalidSignalError("Signal samples must be finite")
    return samples


def require_nonempty(samples: ComplexArray, what: str = "frame") -> None:
    if samples.size == 0:
        raise InvalidSignalError(f"The {what} must contain at least one sample")


def validate_rrc_parameters(roll_off: float, span_symbols: int, sps: int) -> None:
    """Check root-raised-cosine design parameters."""

    if not 0.0 < roll_off <= 1.0:
        raise InvalidSignalError(f"Roll-off must lie in (0, 1], got {roll_off}")
    if span_symbols < 4 or span_symbols % 2:
        raise InvalidSignalError(f"Span must be an even number of symbols >= 4, got {span_symbols}")
    if sps < 2:
        raise InvalidSignalError(f"Samples per symbol must be >= 2, got {sps}")
