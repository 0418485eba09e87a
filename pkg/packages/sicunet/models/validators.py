"""Precondition checks for model construction and inference."""

from __future__ import annotations

from typing import Sequence

from ..dsp import IqFrame
from .exceptions import InvalidFrameError, ModelBankError, UnsupportedClassCountError

# model choice, SPS and SIR heads
SUPPORTED_CLASS_COUNTS: tuple[int, ...] = (2, 3, 21)


def validate_num_classes(num_classes: int) -> None:
    if num_classes not in SUPPORTED_CLASS_COUNTS:
        raise UnsupportedClassCountError(f"Classifiers have 2, 3 or 21 classes, got {num_classes}")


def validate_unet_length(length: int, depth: int) -> None:
    if length < 2**depth:
        raise InvalidFrameError(f"U-Net of depth {depth} needs at least {2**depth} samples, got {length}")


def validate_frames(frames: Sequence[IqFrame]) -> None:
    if not frames:
        raise InvalidFrameError("At least one frame is required")
    lengths = {len(frame) for frame in frames}
    if len(lengths) != 1:
        raise InvalidFrameError(f"Frames in one batch must share a length, got {sorted(lengths)}")


def validate_bank_complete(available: Sequence[int], required: Sequence[int]) -> None:
    missing = sorted(set(required) - set(available))
    if missing:
        raise ModelBankError(f"U-Net bank has no model for interferer sps {missing}; run `sicunet train unet`")
