"""Symbol-grid bookkeeping for fixed-length frames cut from longer transmissions.

A transmission of ``n`` symbols is pulse shaped and the leading filter
transient of ``shape.delay`` samples is cropped, so symbol ``k`` peaks at
frame index ``k·sps``. Symbols whose whole pulse lies inside the frame are
*contained*; symbols whose pulse touches the frame at all are *overlapping*.
"""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidSignalError
from .filters import matched_filter_downsample, pulse_shape
from .modem import qpsk_hard_decision
from .types import BitArray, ComplexArray, IqFrame, PulseShape


def generated_symbol_count(frame_len: int, shape: PulseShape) -> int:
    """Symbols to generate so that a ``frame_len`` window is fully populated."""

    return math.ceil(frame_len / shape.sps) + shape.span_symbols


def first_contained_symbol(shape: PulseShape) -> int:
    return shape.span_symbols // 2


def contained_symbol_count(frame_len: int, shape: PulseShape) -> int:
    """Number of symbols whose full pulse lies inside a ``frame_len`` window."""

    last = (frame_len - 1 - shape.delay) // shape.sps
    return max(last - first_contained_symbol(shape) + 1, 0)


def overlapping_symbol_count(frame_len: int, shape: PulseShape) -> int:
    """Number of symbols, counted from the first peak, whose pulse reaches into the window."""

    return (frame_len - 1 + shape.delay) // shape.sps + 1


def shape_and_crop(symbols: npt.ArrayLike, shape: PulseShape, frame_len: int) -> IqFrame:
    """Pulse shape ``symbols`` and keep ``frame_len`` samples after the leading transient."""

    shaped = pulse_shape(symbols, shape).samples
    start = shape.delay
    if shaped.size < start + frame_len:
        raise InvalidSignalError(
            f"{np.size(symbols)} symbols at sps={shape.sps} cannot fill a {frame_len}-sample frame"
        )
    return IqFrame(shaped[start : start + frame_len], sps=shape.sps)


def contained_symbols(symbols: ComplexArray, shape: PulseShape, frame_len: int) -> ComplexArray:
    """Slice the symbols whose pulses are fully inside the cropped frame."""

    first = first_contained_symbol(shape)
    return symbols[first : first + contained_symbol_count(frame_len, shape)]


def demodulate_contained(frame: IqFrame | npt.ArrayLike, shape: PulseShape) -> BitArray:
    """Hard-decide the bits of every symbol fully contained in ``frame``."""

    length = len(frame) if isinstance(frame, IqFrame) else np.size(frame)
    count = contained_symbol_count(length, shape)
    return qpsk_hard_decision(matched_filter_downsample(frame, shape, count, offset=0))


def demodulate_overlapping(frame: IqFrame | npt.ArrayLike, shape: PulseShape) -> BitArray:
    """Hard-decide every symbol whose pulse reaches into ``frame``, edge symbols included.

    Symbol ``j`` of the result is the one peaking at frame index ``j·sps``.
    """

    length = len(frame) if isinstance(frame, IqFrame) else np.size(frame)
    count = overlapping_symbol_count(length, shape)
    return qpsk_hard_decision(matched_filter_downsample(frame, shape, count, offset=-shape.delay))


def trailing_edge_symbol_count(frame_len: int, shape: PulseShape) -> int:
    """Overlapping symbols that peak after the last sample of the frame.

    These are the last ``span_symbols / 2`` symbols of the overlapping set.
    Only a tail of their pulse is visible, so their hard decisions are unreliable.
    """

    return overlapping_symbol_count(frame_len, shape) - ((frame_len - 1) // shape.sps + 1)
