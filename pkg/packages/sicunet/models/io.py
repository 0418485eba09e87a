"""Saving and loading trained models."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping, TypeVar

from ..nn import Checkpoint, CheckpointError, Module, load_checkpoint, save_checkpoint
from ..utils import PathLike
from .classifier import CnnClassifier
from .exceptions import ModelLoadError
from .unet import UNet

LOGGER = logging.getLogger("sicunet.models")

ModelT = TypeVar("ModelT", bound=Module)


def save_model(model: Module, path: PathLike, *, metadata: Mapping[str, Any] | None = None) -> Path:
    try:
        return save_checkpoint(model, path, metadata)
    except CheckpointError as exc:
        raise ModelLoadError(str(exc)) from exc


def load_model(path: PathLike) -> Checkpoint:
    """Load any checkpoint whose architecture is registered with :mod:`sicunet.nn`."""

    try:
        return load_checkpoint(path)
    except CheckpointError as exc:
        raise ModelLoadError(str(exc)) from exc


def _load_typed(path: PathLike, kind: type[ModelT]) -> ModelT:
    checkpoint = load_model(path)
    if not isinstance(checkpoint.model, kind):
        raise ModelLoadError(f"{path}: expected a {kind.__name__} checkpoint, found {type(checkpoint.model).__name__}")
    return checkpoint.model


def load_classifier(path: PathLike) -> CnnClassifier:
    return _load_typed(path, CnnClassifier)


def load_unet(path: PathLike) -> UNet:
    return _load_typed(path, UNet)
