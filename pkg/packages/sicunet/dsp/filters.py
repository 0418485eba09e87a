"""Root-raised-cosine design, pulse shaping and matched filtering."""

from __future__ import annotations

import logging
import math

import numpy as np
import numpy.typing as npt
from scipy.signal import fftconvolve

from .exceptions import InvalidSignalError
from .types import DEFAULT_ROLL_OFF, DEFAULT_SPAN_SYMBOLS, ComplexArray, IqFrame, PulseShape
from .validators import as_samples, require_nonempty, validate_rrc_parameters

_LOGGER = logging.getLogger("sicunet.dsp")

_SINGULAR_TOL = 1e-10


def design_rrc(
    roll_off: float = DEFAULT_ROLL_OFF,
    span_symbols: int = DEFAULT_SPAN_SYMBOLS,
    sps: int = 16,
) -> PulseShape:
    """Return unit-energy root-raised-cosine taps spanning ``span_symbols``.

    The closed form is evaluated with time measured in symbol periods. The
    removable singularities at ``t = 0`` and ``t = ±1/(4·roll_off)`` are
    replaced by their analytic limits.

    Raises:
        InvalidSignalError: If any parameter is out of range.
    """

    validate_rrc_parameters(roll_off, span_symbols, sps)
    beta = float(roll_off)
    n_taps = span_symbols * sps + 1
    t = (np.arange(n_taps, dtype=np.float64) - (n_taps - 1) / 2.0) / sps

    taps = np.empty(n_taps, dtype=np.float64)
    at_zero = np.abs(t) < _SINGULAR_TOL
    at_quarter = np.abs(np.abs(t) - 1.0 / (4.0 * beta)) < _SINGULAR_TOL
    regular = ~(at_zero | at_quarter)

    tr = t[regular]
    numerator = np.sin(math.pi * tr * (1.0 - beta)) + 4.0 * beta * tr * np.cos(math.pi * tr * (1.0 + beta))
    denominator = math.pi * tr * (1.0 - (4.0 * beta * tr) ** 2)
    taps[regular] = numerator / denominator
    taps[at_zero] = 1.0 - beta + 4.0 * beta / math.pi
    taps[at_quarter] = (beta / math.sqrt(2.0)) * (
        (1.0 + 2.0 / math.pi) * math.sin(math.pi / (4.0 * beta))
        + (1.0 - 2.0 / math.pi) * math.cos(math.pi / (4.0 * beta))
    )

    taps /= math.sqrt(float(np.sum(taps * taps)))
    # exact mirror so the matched filter equals the transmit filter
    taps = 0.5 * (taps + taps[::-1])
    taps /= math.sqrt(float(np.sum(taps * taps)))
    _LOGGER.debug("Designed RRC filter: roll_off=%s span=%s sps=%s taps=%s", beta, span_symbols, sps, n_taps)
    return PulseShape(taps=taps, roll_off=beta, span_symbols=span_symbols, sps=sps)


def _real_fir(samples: ComplexArray, taps: npt.NDArray[np.float64]) -> ComplexArray:
    # I and Q are filtered separately so a zero channel stays exactly zero
    return fftconvolve(samples.real, taps) + 1j * fftconvolve(samples.imag, taps)


def pulse_shape(symbols: npt.ArrayLike, shape: PulseShape) -> IqFrame:
    """Upsample ``symbols`` by ``shape.sps`` and filter them with the pulse taps.

    The output holds ``len(symbols) × sps + len(taps) − 1`` samples.
    """

    values = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    require_nonempty(values, "symbol sequence")
    upsampled = np.zeros(values.size * shape.sps, dtype=np.complex128)
    upsampled[:: shape.sps] = values
    return IqFrame(_real_fir(upsampled, shape.taps), sps=shape.sps)


def matched_filter(frame: IqFrame | npt.ArrayLike, shape: PulseShape) -> ComplexArray:
    """Return the full matched-filter output of ``frame``."""

    samples = as_samples(frame)
    require_nonempty(samples)
    return _real_fir(samples, shape.taps[::-1])


def matched_filter_downsample(
    frame: IqFrame | npt.ArrayLike,
    shape: PulseShape,
    symbol_count: int,
    *,
    offset: int = 0,
) -> ComplexArray:
    """Matched-filter ``frame`` and sample one value per symbol.

    Args:
        frame: Received samples.
        shape: Pulse shape used by the transmitter.
        symbol_count: Number of symbols to extract.
        offset: Frame index at which the first symbol's pulse starts. It may
            be negative when the frame was cropped inside a pulse; the frame
            is treated as zero outside its bounds.

    Raises:
        InvalidSignalError: If a sampling instant falls outside the filter
            output or a fully contained pulse cannot be guaranteed for
            ``offset >= 0``.
    """

    samples = as_samples(frame)
    require_nonempty(samples)
    if symbol_count < 0:
        raise InvalidSignalError(f"Symbol count must be non-negative, got {symbol_count}")
    n_taps = len(shape)
    first = n_taps - 1 + offset
    if first < 0:
        raise InvalidSignalError(f"Offset {offset} lies before the filter output")
    if symbol_count == 0:
        return np.zeros(0, dtype=np.complex128)
    last_pulse_end = offset + (symbol_count - 1) * shape.sps + n_taps
    if (offset >= 0 and last_pulse_end > samples.size) or first + (symbol_count - 1) * shape.sps >= samples.size + n_taps - 1:
        raise InvalidSignalError(
            f"Frame of {samples.size} samples cannot hold {symbol_count} symbols at sps={shape.sps}"
        )
    filtered = matched_filter(samples, shape)
    return filtered[first : first + symbol_count * shape.sps : shape.sps]
