"""Complex-baseband primitives for the :mod:`sicunet` toolkit."""

from __future__ import annotations

from .channel import add_awgn, db_to_linear, interferer_gain, measure_power, mix_at_sir
from .exceptions import DspError, InvalidSignalError
from .filters import design_rrc, matched_filter, matched_filter_downsample, pulse_shape
from .framing import (
    contained_symbol_count,
    contained_symbols,
    demodulate_contained,
    demodulate_overlapping,
    first_contained_symbol,
    generated_symbol_count,
    overlapping_symbol_count,
    shape_and_crop,
    trailing_edge_symbol_count,
)
from .modem import qpsk_hard_decision, qpsk_modulate
from .types import (
    DEFAULT_ROLL_OFF,
    DEFAULT_SPAN_SYMBOLS,
    SUPPORTED_SPS,
    IqFrame,
    PulseShape,
)
from .validators import validate_bits

__all__ = [
    "DEFAULT_ROLL_OFF",
    "DEFAULT_SPAN_SYMBOLS",
    "SUPPORTED_SPS",
    "IqFrame",
    "PulseShape",
    "qpsk_modulate",
    "qpsk_hard_decision",
    "design_rrc",
    "pulse_shape",
    "matched_filter",
    "matched_filter_downsample",
    "generated_symbol_count",
    "first_contained_symbol",
    "contained_symbol_count",
    "overlapping_symbol_count",
    "trailing_edge_symbol_count",
    "shape_and_crop",
    "contained_symbols",
    "demodulate_contained",
    "demodulate_overlapping",
    "measure_power",
    "mix_at_sir",
    "interferer_gain",
    "add_awgn",
    "db_to_linear",
    "validate_bits",
    "DspError",
    "InvalidSignalError",
]
