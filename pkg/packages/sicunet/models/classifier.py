"""Shared CNN classifier used by the SPS, SIR and method stages."""

from __future__ import annotations

import dataclasses
import logging
from typing import Any, Mapping, Sequence

import numpy as np
import numpy.typing as npt

from ..dsp import IqFrame
from ..nn import (
    BatchNorm1d,
    Conv1d,
    Dense,
    Flatten,
    MaxPool1d,
    Module,
    ReLU,
    Sequential,
    build_module,
    predict,
    register_module,
    softmax,
)
from ..scenario import DEFAULT_FRAME_LEN
from .exceptions import InvalidFrameError
from .preprocessing import frames_to_batch
from .validators import validate_num_classes

LOGGER = logging.getLogger("sicunet.models")

DEFAULT_CONV_BLOCKS: tuple[tuple[int, int, int], ...] = ((16, 7, 4), (32, 7, 4), (64, 7, 4), (64, 7, 4))


@dataclasses.dataclass(frozen=True, slots=True)
class CnnClassifierSpec:
    """Topology of the classifier: ``conv_blocks`` holds ``(channels, kernel, pool)`` triples."""

    num_classes: int
    in_channels: int = 2
    input_length: int = DEFAULT_FRAME_LEN
    conv_blocks: tuple[tuple[int, int, int], ...] = DEFAULT_CONV_BLOCKS
    hidden_width: int = 128

    def __post_init__(self) -> None:
        object.__setattr__(self, "conv_blocks", tuple(tuple(int(v) for v in block) for block in self.conv_blocks))
        validate_num_classes(self.num_classes)
        if self.in_channels < 2:
            raise InvalidFrameError("The classifier needs at least the I and Q channels")
        if self.flattened_length() < 1:
            raise InvalidFrameError(f"Input length {self.input_length} vanishes after pooling")

    def flattened_length(self) -> int:
        length = self.input_length
        for _, _, pool in self.conv_blocks:
            length //= pool
        return length

    def to_dict(self) -> dict[str, Any]:
        return {
            "num_classes": self.num_classes,
            "in_channels": self.in_channels,
            "input_length": self.input_length,
            "conv_blocks": [list(block) for block in self.conv_blocks],
            "hidden_width": self.hidden_width,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "CnnClassifierSpec":
        return cls(
            num_classes=int(payload["num_classes"]),
            in_channels=int(payload.get("in_channels", 2)),
            input_length=int(payload.get("input_length", DEFAULT_FRAME_LEN)),
            conv_blocks=tuple(tuple(block) for block in payload.get("conv_blocks", DEFAULT_CONV_BLOCKS)),
            hidden_width=int(payload.get("hidden_width", 128)),
        )


@register_module("cnn_classifier")
class CnnClassifier(Module):
    """Conv/BN/ReLU/pool blocks followed by two dense layers producing logits."""

    def __init__(self, spec: CnnClassifierSpec, *, seed: int = 0, body: Sequential | None = None) -> None:
        super().__init__()
        self.spec = spec
        self.body = body if body is not None else self._build(spec, np.random.default_rng(seed))

    @staticmethod
    def _build(spec: CnnClassifierSpec, rng: np.random.Generator) -> Sequential:
        layers: list[Module] = []
        channels = spec.in_channels
        for out_channels, kernel, pool in spec.conv_blocks:
            layers += [
                Conv1d(channels, out_channels, kernel, padding="same", rng=rng),
                BatchNorm1d(out_channels),
                ReLU(),
                MaxPool1d(pool),
            ]
            channels = out_channels
        layers += [
            Flatten(),
            Dense(channels * spec.flattened_length(), spec.hidden_width, rng=rng),
            ReLU(),
            Dense(spec.hidden_width, spec.num_classes, rng=rng),
        ]
        return Sequential(layers)

    def forward(self, x: npt.NDArray[np.floating]) -> npt.NDArray[np.floating]:
        if x.ndim != 3 or x.shape[1:] != (self.spec.in_channels, self.spec.input_length):
            raise InvalidFrameError(
                f"Classifier expects batches shaped N x {self.spec.in_channels} x {self.spec.input_length}, got {x.shape}"
            )
        return self.body.forward(x)

    def backward(self, grad: npt.NDArray[np.floating]) -> npt.NDArray[np.floating]:
        return self.body.backward(grad)

    def children(self) -> Sequence[tuple[str, Module]]:
        return [("body", self.body)]

    def describe(self) -> dict[str, Any]:
        return {"type": self.kind, "spec": self.spec.to_dict(), "body": self.body.describe()}

    @classmethod
    def from_descriptor(cls, descriptor: Mapping[str, Any]) -> "CnnClassifier":
        body = build_module(descriptor["body"])
        if not isinstance(body, Sequential):
            raise InvalidFrameError("Classifier body must be a sequential stack")
        return cls(CnnClassifierSpec.from_dict(descriptor["spec"]), body=body)


def build_classifier(
    num_classes: int,
    *,
    in_channels: int = 2,
    input_length: int = DEFAULT_FRAME_LEN,
    seed: int = 0,
    spec: CnnClassifierSpec | None = None,
) -> CnnClassifier:
    """Build an untrained classifier with Kaiming-uniform weights drawn from ``seed``."""

    spec = spec or CnnClassifierSpec(num_classes=num_classes, in_channels=in_channels, input_length=input_length)
    model = CnnClassifier(spec, seed=seed)
    LOGGER.debug("Built %d-class classifier with %d parameters", spec.num_classes, model.parameter_count())
    return model


@dataclasses.dataclass(frozen=True, slots=True)
class Classification:
    posteriors: npt.NDArray[np.float64]
    decision: int


def classify_batch(
    model: CnnClassifier,
    frames: Sequence[IqFrame],
    *,
    side_values: npt.ArrayLike | None = None,
    batch_size: int = 64,
) -> npt.NDArray[np.float64]:
    """Return the ``N × K`` posterior matrix for ``frames``."""

    expected_side = model.spec.in_channels - 2
    given_side = 0 if side_values is None else np.asarray(side_values).reshape(len(frames), -1).shape[1]
    if given_side != expected_side:
        raise InvalidFrameError(f"Model expects {expected_side} side channels, got {given_side}")
    dtype = model.body.layers[0].weight.dtype
    batch, _ = frames_to_batch(frames, model.spec.input_length, side_values=side_values, dtype=dtype)
    logits = predict(model, batch, batch_size=batch_size)
    return softmax(logits.astype(np.float64))


def classify(model: CnnClassifier, mixture: IqFrame, *, side_values: Sequence[float] | None = None) -> Classification:
    """Classify one frame; the decision is the lowest-index maximum posterior."""

    side = None if side_values is None else np.asarray(side_values, dtype=np.float64).reshape(1, -1)
    posteriors = classify_batch(model, [mixture], side_values=side)[0]
    return Classification(posteriors=posteriors, decision=int(np.argmax(posteriors)))
