"""Fitting the stage classifiers and U-Nets on IQ frames."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import numpy.typing as npt

from ..dsp import IqFrame
from ..nn import TrainConfig, TrainResult, train_epochs
from .classifier import CnnClassifier
from .exceptions import InvalidFrameError
from .preprocessing import fit_length, frames_to_batch
from .unet import UNet


def fit_classifier(
    model: CnnClassifier,
    frames: Sequence[IqFrame],
    labels: npt.ArrayLike,
    config: TrainConfig,
    *,
    side_values: npt.ArrayLike | None = None,
) -> TrainResult:
    """Train ``model`` with cross-entropy on unit-power frames plus optional side channels."""

    batch, _ = frames_to_batch(frames, model.spec.input_length, side_values=side_values, dtype=config.dtype)
    if batch.shape[1] != model.spec.in_channels:
        raise InvalidFrameError(f"Model expects {model.spec.in_channels} input channels, got {batch.shape[1]}")
    return train_epochs(model, batch, labels, config, loss="cross_entropy")


def unet_training_pairs(
    mixtures: Sequence[IqFrame],
    targets: Sequence[IqFrame],
    dtype: npt.DTypeLike = np.float32,
) -> tuple[npt.NDArray[np.floating], npt.NDArray[np.floating]]:
    """Unit-power mixtures and their clean SOI frames scaled by the same per-frame gain."""

    if len(mixtures) != len(targets):
        raise InvalidFrameError(f"Got {len(targets)} targets for {len(mixtures)} mixtures")
    inputs, scales = frames_to_batch(mixtures, dtype=dtype)
    clean = np.zeros_like(inputs)
    for row, (target, scale) in enumerate(zip(targets, scales)):
        clean[row] = fit_length(target.to_channels(np.float64) * scale, inputs.shape[2])
    return inputs, clean


def fit_unet(model: UNet, mixtures: Sequence[IqFrame], targets: Sequence[IqFrame], config: TrainConfig) -> TrainResult:
    """Train ``model`` with mean-squared error towards the clean SOI waveform."""

    inputs, clean = unet_training_pairs(mixtures, targets, config.dtype)
    return train_epochs(model, inputs, clean, config, loss="mse")
