"""Power measurement, SIR-calibrated mixing and additive noise."""

from __future__ import annotations

import logging
import math

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidSignalError
from .types import IqFrame
from .validators import as_samples, require_nonempty

_LOGGER = logging.getLogger("sicunet.dsp")


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def measure_power(frame: IqFrame | npt.ArrayLike) -> float:
    """Return the mean of ``i² + q²`` over every sample of ``frame``."""

    samples = as_samples(frame)
    require_nonempty(samples)
    return float(np.mean(samples.real * samples.real + samples.imag * samples.imag))


def interferer_gain(soi: IqFrame, interferer: IqFrame, sir_db: float) -> float:
    """Amplitude gain that places ``interferer`` at ``sir_db`` below ``soi``.

    Raises:
        InvalidSignalError: If the frames differ in length, either one has zero
            power, or ``sir_db`` is not finite.
    """

    if len(soi) != len(interferer):
        raise InvalidSignalError(
            f"SOI and interferer lengths differ: {len(soi)} != {len(interferer)}"
        )
    if not math.isfinite(sir_db):
        raise InvalidSignalError(f"SIR must be finite, got {sir_db}")
    p_soi = measure_power(soi)
    p_int = measure_power(interferer)
    if p_soi <= 0.0 or p_int <= 0.0:
        raise InvalidSignalError("Both mixture components must have non-zero power")
    return math.sqrt(p_soi / (p_int * db_to_linear(sir_db)))


def mix_at_sir(soi: IqFrame, interferer: IqFrame, sir_db: float) -> IqFrame:
    """Return ``soi + g·interferer`` with ``g`` chosen so that SOI/interferer power equals ``sir_db``."""

    gain = interferer_gain(soi, interferer, sir_db)
    _LOGGER.debug("Mixing at SIR %.3f dB with interferer gain %.6f", sir_db, gain)
    return IqFrame(soi.samples + gain * interferer.samples, sps=soi.sps)


def add_awgn(frame: IqFrame, snr_db: float, rng: np.random.Generator) -> IqFrame:
    """Add complex white Gaussian noise at ``snr_db`` relative to the frame power.

    Each component receives independent noise of variance ``N / 2`` where
    ``N = P_frame / 10^(snr_db / 10)``.
    """

    power = measure_power(frame)
    noise_power = power / db_to_linear(snr_db)
    sigma = math.sqrt(noise_power / 2.0)
    noise = rng.normal(0.0, sigma, size=(2, len(frame)))
    return IqFrame(frame.samples + noise[0] + 1j * noise[1], sps=frame.sps)
