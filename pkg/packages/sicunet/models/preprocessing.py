"""Turning IQ frames into network inputs and back."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
import numpy.typing as npt

from ..dsp import IqFrame, measure_power
from .exceptions import InvalidFrameError
from .validators import validate_frames


def unit_power_scale(frame: IqFrame) -> float:
    """Gain that brings ``frame`` to unit average power (``1`` for an all-zero frame)."""

    power = measure_power(frame)
    return 1.0 / math.sqrt(power) if power > 0.0 else 1.0


def fit_length(channels: npt.NDArray[np.floating], length: int) -> npt.NDArray[np.floating]:
    """Crop or right-pad with zeros along the last axis to exactly ``length`` samples."""

    current = channels.shape[-1]
    if current == length:
        return channels
    if current > length:
        return channels[..., :length]
    pad = [(0, 0)] * (channels.ndim - 1) + [(0, length - current)]
    return np.pad(channels, pad)


def frames_to_batch(
    frames: Sequence[IqFrame],
    length: int | None = None,
    *,
    side_values: npt.ArrayLike | None = None,
    dtype: npt.DTypeLike = np.float32,
) -> tuple[npt.NDArray[np.floating], npt.NDArray[np.float64]]:
    """Stack unit-power frames into ``N × (2 + S) × length`` and return the per-frame gains.

    ``side_values`` (``N × S``) become constant channels appended after I and Q.
    """

    validate_frames(frames)
    length = length or len(frames[0])
    scales = np.array([unit_power_scale(frame) for frame in frames])
    extra = 0 if side_values is None else np.asarray(side_values, dtype=np.float64).reshape(len(frames), -1)
    n_side = 0 if side_values is None else extra.shape[1]
    batch = np.zeros((len(frames), 2 + n_side, length), dtype=dtype)
    for row, (frame, scale) in enumerate(zip(frames, scales)):
        batch[row, :2] = fit_length(frame.to_channels(np.float64) * scale, length)
        if n_side:
            batch[row, 2:] = extra[row][:, None]
    return batch, scales


def batch_to_frames(
    outputs: npt.NDArray[np.floating],
    scales: npt.ArrayLike,
    *,
    sps: int | None = None,
) -> list[IqFrame]:
    """Undo the per-frame gain applied by :func:`frames_to_batch`."""

    gains = np.asarray(scales, dtype=np.float64)
    if outputs.ndim != 3 or outputs.shape[1] != 2 or outputs.shape[0] != gains.size:
        raise InvalidFrameError(f"Expected N x 2 x L outputs for {gains.size} frames, got {outputs.shape}")
    return [
        IqFrame.from_channels(outputs[row].astype(np.float64) / gains[row], sps=sps)
        for row in range(outputs.shape[0])
    ]
