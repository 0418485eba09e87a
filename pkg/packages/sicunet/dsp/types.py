"""Signal containers shared across the :mod:`sicunet` toolkit."""

from __future__ import annotations

import dataclasses

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidSignalError

SUPPORTED_SPS: tuple[int, ...] = (32, 16, 4)

DEFAULT_ROLL_OFF = 0.35
DEFAULT_SPAN_SYMBOLS = 8

BitArray = npt.NDArray[np.uint8]
ComplexArray = npt.NDArray[np.complex128]


@dataclasses.dataclass(frozen=True, slots=True)
class IqFrame:
    """Complex baseband time series stored as aligned I and Q components.

    ``samples`` is a contiguous ``complex128`` array; ``sps`` is the
    oversampling factor of the waveform when it is known.
    """

    samples: ComplexArray
    sps: int | None = None

    def __post_init__(self) -> None:
        samples = np.ascontiguousarray(self.samples, dtype=np.complex128).reshape(-1)
        if samples.size == 0:
            raise InvalidSignalError("IqFrame requires at least one sample")
        if not np.all(np.isfinite(samples)):
            raise InvalidSignalError("IqFrame samples must be finite")
        if self.sps is not None and self.sps < 1:
            raise InvalidSignalError(f"Samples per symbol must be positive, got {self.sps}")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def i(self) -> npt.NDArray[np.float64]:
        return self.samples.real

    @property
    def q(self) -> npt.NDArray[np.float64]:
        return self.samples.imag

    @classmethod
    def from_channels(cls, channels: npt.ArrayLike, sps: int | None = None) -> "IqFrame":
        """Build a frame from a ``2 × L`` real array laid out as (I, Q)."""

        array = np.asarray(channels, dtype=np.float64)
        if array.ndim != 2 or array.shape[0] != 2:
            raise InvalidSignalError(f"Expected a 2 x L array, got shape {array.shape}")
        return cls(array[0] + 1j * array[1], sps=sps)

    def to_channels(self, dtype: npt.DTypeLike = np.float64) -> npt.NDArray[np.floating]:
        """Return the frame as a contiguous ``2 × L`` real array."""

        return np.ascontiguousarray(np.stack([self.i, self.q]), dtype=dtype)

    def scaled(self, gain: float) -> "IqFrame":
        return IqFrame(self.samples * gain, sps=self.sps)


@dataclasses.dataclass(frozen=True, slots=True)
class PulseShape:
    """FIR pulse-shaping filter taps together with their design parameters."""

    taps: npt.NDArray[np.float64]
    roll_off: float
    span_symbols: int
    sps: int

    @property
    def delay(self) -> int:
        """Group delay of one filter in samples (half the tap span)."""

        return (self.taps.size - 1) // 2

    def __len__(self) -> int:
        return int(self.taps.size)
