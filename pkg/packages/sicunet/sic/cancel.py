"""Single-pass successive interference cancellation for QPSK-on-QPSK mixtures."""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
from typing import Any, Literal, Mapping

import numpy as np
import numpy.typing as npt

from ..dsp import (
    DEFAULT_ROLL_OFF,
    DEFAULT_SPAN_SYMBOLS,
    InvalidSignalError,
    IqFrame,
    PulseShape,
    db_to_linear,
    demodulate_contained,
    demodulate_overlapping,
    design_rrc,
    measure_power,
    overlapping_symbol_count,
    qpsk_modulate,
    shape_and_crop,
    trailing_edge_symbol_count,
)
from ..dsp.types import BitArray
from .exceptions import InvalidSicInputError
from .validators import validate_mixture, validate_sic_config

LOGGER = logging.getLogger("sicunet.sic")

PowerReference = Literal["mixture", "soi"]
CancellationOrder = Literal["interferer", "none"]


@functools.lru_cache(maxsize=32)
def _cached_shape(roll_off: float, span_symbols: int, sps: int) -> PulseShape:
    return design_rrc(roll_off, span_symbols, sps)


@dataclasses.dataclass(frozen=True, slots=True)
class SicConfig:
    """Parameters of one cancellation run.

    ``power_reference="mixture"`` splits the measured mixture power according
    to ``sir_est_db``; ``"soi"`` instead assumes the SOI carries ``soi_power``.
    ``exclude_edge_symbols`` leaves the interferer symbols that peak outside
    the frame out of the reconstruction. With frames cut at the first
    transmitted peak these are the last ``span_symbols / 2`` symbols.
    """

    soi_sps: int = 16
    interferer_sps: int = 16
    sir_est_db: float = 0.0
    roll_off: float = DEFAULT_ROLL_OFF
    span_symbols: int = DEFAULT_SPAN_SYMBOLS
    max_passes: int = 1
    cancel_when_soi_stronger: bool = False
    exclude_edge_symbols: bool = True
    power_reference: PowerReference = "mixture"
    soi_power: float = 1.0
    frame_len: int | None = None

    def __post_init__(self) -> None:
        validate_sic_config(self)

    @property
    def soi_shape(self) -> PulseShape:
        return _cached_shape(self.roll_off, self.span_symbols, self.soi_sps)

    @property
    def interferer_shape(self) -> PulseShape:
        return _cached_shape(self.roll_off, self.span_symbols, self.interferer_sps)

    def with_estimates(self, interferer_sps: int, sir_est_db: float) -> "SicConfig":
        return dataclasses.replace(self, interferer_sps=int(interferer_sps), sir_est_db=float(sir_est_db))

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "SicConfig":
        known = {field.name for field in dataclasses.fields(cls)}
        return cls(**{key: value for key, value in payload.items() if key in known})


@dataclasses.dataclass(frozen=True, slots=True)
class SicResult:
    soi_bits: BitArray
    residual: IqFrame
    order: CancellationOrder
    interferer_bits_est: BitArray


def scale_for_cancellation(
    mixture_power: float,
    sir_est_db: float,
    reconstruction_power: float = 1.0,
) -> float:
    """Amplitude that brings a reconstruction to the interferer power implied by ``sir_est_db``.

    Solves ``P_soi + P_int = P_mix`` with ``P_soi / P_int = 10^(sir/10)`` and
    returns ``sqrt(P_int / reconstruction_power)``.

    Raises:
        InvalidSicInputError: If either power is not positive or the SIR is not finite.
    """

    if not mixture_power > 0.0 or not reconstruction_power > 0.0:
        raise InvalidSicInputError("Mixture and reconstruction powers must be positive")
    if not math.isfinite(sir_est_db):
        raise InvalidSicInputError(f"SIR estimate must be finite, got {sir_est_db}")
    interferer_power = mixture_power / (1.0 + db_to_linear(sir_est_db))
    return math.sqrt(interferer_power / reconstruction_power)


def reconstruct_interferer(
    bits: npt.ArrayLike,
    shape: PulseShape,
    frame_len: int,
    *,
    dropped_trailing_symbols: int = 0,
) -> IqFrame:
    """Remodulate the decided interferer bits into a frame aligned with the mixture.

    The frame is scaled so that the reconstruction of *all* symbols has unit
    power; the last ``dropped_trailing_symbols`` symbols are then zeroed
    without rescaling, so the remaining ones keep their true amplitude.
    """

    symbols = qpsk_modulate(bits)
    frame = shape_and_crop(symbols, shape, frame_len)
    power = measure_power(frame)
    if power <= 0.0:
        raise InvalidSicInputError("Reconstructed interferer has zero power")
    if dropped_trailing_symbols > 0:
        symbols = symbols.copy()
        symbols[-dropped_trailing_symbols:] = 0.0
        frame = shape_and_crop(symbols, shape, frame_len)
    return frame.scaled(1.0 / math.sqrt(power))


def _cancellation_gain(mixture: IqFrame, config: SicConfig) -> float:
    if config.power_reference == "soi":
        return math.sqrt(config.soi_power / db_to_linear(config.sir_est_db))
    return scale_for_cancellation(measure_power(mixture), config.sir_est_db)


def sic_cancel(
    mixture: IqFrame,
    config: SicConfig,
    *,
    forced_interferer_bits: npt.ArrayLike | None = None,
) -> SicResult:
    """Recover SOI bits from ``mixture``, cancelling the interferer first when it is stronger.

    With ``sir_est_db < 0`` (or ``cancel_when_soi_stronger``) every interferer
    symbol that reaches into the frame is decided. The decisions are
    remodulated, scaled and subtracted before the SOI is demodulated; symbols
    peaking outside the frame are left in the mixture unless
    ``exclude_edge_symbols`` is off. Otherwise the SOI is demodulated directly.
    ``forced_interferer_bits`` replaces the interferer decisions.

    Raises:
        InvalidSicInputError: On length, sps or bit-count mismatches.
    """

    validate_mixture(mixture, config)
    frame_len = len(mixture)
    soi_shape = config.soi_shape

    if config.sir_est_db >= 0.0 and not config.cancel_when_soi_stronger:
        try:
            bits = demodulate_contained(mixture, soi_shape)
        except InvalidSignalError as exc:
            raise InvalidSicInputError(str(exc)) from exc
        return SicResult(soi_bits=bits, residual=mixture, order="none", interferer_bits_est=np.zeros(0, dtype=np.uint8))

    int_shape = config.interferer_shape
    try:
        if forced_interferer_bits is None:
            interferer_bits = demodulate_overlapping(mixture, int_shape)
        else:
            interferer_bits = np.asarray(forced_interferer_bits, dtype=np.uint8).reshape(-1)
            expected = 2 * overlapping_symbol_count(frame_len, int_shape)
            if interferer_bits.size != expected:
                raise InvalidSicInputError(f"Forced interferer bits must hold {expected} values, got {interferer_bits.size}")
        dropped = trailing_edge_symbol_count(frame_len, int_shape) if config.exclude_edge_symbols else 0
        reconstruction = reconstruct_interferer(
            interferer_bits, int_shape, frame_len, dropped_trailing_symbols=dropped
        )
        gain = _cancellation_gain(mixture, config)
        residual = IqFrame(mixture.samples - gain * reconstruction.samples, sps=mixture.sps)
        soi_bits = demodulate_contained(residual, soi_shape)
    except InvalidSignalError as exc:
        raise InvalidSicInputError(str(exc)) from exc

    LOGGER.debug(
        "SIC cancelled sps=%d interferer at %.2f dB (gain %.5f)", config.interferer_sps, config.sir_est_db, gain
    )
    return SicResult(soi_bits=soi_bits, residual=residual, order="interferer", interferer_bits_est=interferer_bits)
