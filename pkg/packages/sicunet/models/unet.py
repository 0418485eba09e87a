"""1-D U-Net waveform denoiser and bit recovery from its output."""

from __future__ import annotations

import dataclasses
import logging
from typing import Any, Mapping, Sequence

import numpy as np
import numpy.typing as npt

from ..dsp import IqFrame, PulseShape, demodulate_contained
from ..dsp.types import BitArray
from ..nn import (
    BatchNorm1d,
    Conv1d,
    MaxPool1d,
    Module,
    MissingContextError,
    ReLU,
    Sequential,
    Upsample1d,
    build_module,
    predict,
    register_module,
)
from ..nn.layers import Mode
from .exceptions import InvalidFrameError
from .preprocessing import batch_to_frames, frames_to_batch
from .validators import validate_unet_length

LOGGER = logging.getLogger("sicunet.models")


@dataclasses.dataclass(frozen=True, slots=True)
class UnetSpec:
    """Encoder depth, channel width of the first level and convolution kernel size.

    Level ``l`` carries ``base_channels · 2^l`` channels; the bottleneck sits
    below the deepest level.
    """

    depth: int = 4
    base_channels: int = 16
    kernel_size: int = 7
    channels: int = 2

    def __post_init__(self) -> None:
        if self.depth < 1 or self.base_channels < 1:
            raise InvalidFrameError("U-Net depth and base_channels must be positive")
        if self.kernel_size % 2 == 0:
            raise InvalidFrameError("U-Net kernel_size must be odd")

    @property
    def multiple(self) -> int:
        return 2**self.depth

    def width(self, level: int) -> int:
        return self.base_channels * 2**level

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "UnetSpec":
        known = {field.name for field in dataclasses.fields(cls)}
        return cls(**{key: value for key, value in payload.items() if key in known})


def _conv_block(in_channels: int, out_channels: int, kernel: int, rng: np.random.Generator) -> Sequential:
    return Sequential([Conv1d(in_channels, out_channels, kernel, rng=rng), BatchNorm1d(out_channels), ReLU()])


@register_module("unet")
class UNet(Module):
    """Encoder/decoder with a concatenated skip connection at every level.

    Inputs of any length ≥ ``2^depth`` are zero-padded on the right to a
    multiple of ``2^depth`` and the output is cropped back.
    """

    def __init__(self, spec: UnetSpec, *, seed: int = 0, blocks: Mapping[str, Module] | None = None) -> None:
        super().__init__()
        self.spec = spec
        self.upsample = Upsample1d(2)
        self.blocks: dict[str, Module] = dict(blocks) if blocks is not None else self._build(np.random.default_rng(seed))
        self._pools = [MaxPool1d(2) for _ in range(spec.depth)]
        self._length: int | None = None

    def _build(self, rng: np.random.Generator) -> dict[str, Module]:
        spec, k = self.spec, self.spec.kernel_size
        blocks: dict[str, Module] = {}
        in_channels = spec.channels
        for level in range(spec.depth):
            blocks[f"enc{level}"] = _conv_block(in_channels, spec.width(level), k, rng)
            in_channels = spec.width(level)
        blocks["bottleneck"] = _conv_block(in_channels, spec.width(spec.depth), k, rng)
        for level in reversed(range(spec.depth)):
            blocks[f"up{level}"] = _conv_block(spec.width(level + 1), spec.width(level), k, rng)
            blocks[f"dec{level}"] = _conv_block(2 * spec.width(level), spec.width(level), k, rng)
        blocks["head"] = Conv1d(spec.width(0), spec.channels, 1, rng=rng)
        return blocks

    def set_mode(self, mode: Mode) -> "UNet":
        super().set_mode(mode)
        for pool in self._pools:
            pool.set_mode(mode)
        return self

    def forward(self, x: npt.NDArray[np.floating]) -> npt.NDArray[np.floating]:
        if x.ndim != 3 or x.shape[1] != self.spec.channels:
            raise InvalidFrameError(f"U-Net expects N x {self.spec.channels} x L input, got {x.shape}")
        length = x.shape[2]
        validate_unet_length(length, self.spec.depth)
        padded_len = -(-length // self.spec.multiple) * self.spec.multiple
        h = np.pad(x, ((0, 0), (0, 0), (0, padded_len - length))) if padded_len != length else x

        skips: list[npt.NDArray[np.floating]] = []
        for level in range(self.spec.depth):
            h = self.blocks[f"enc{level}"].forward(h)
            skips.append(h)
            h = self._pools[level].forward(h)
        h = self.blocks["bottleneck"].forward(h)
        for level in reversed(range(self.spec.depth)):
            h = self.blocks[f"up{level}"].forward(self.upsample.forward(h))
            h = self.blocks[f"dec{level}"].forward(np.concatenate([h, skips[level]], axis=1))
        out = self.blocks["head"].forward(h)

        if self.training:
            self._length = length
        return out[:, :, :length]

    def backward(self, grad: npt.NDArray[np.floating]) -> npt.NDArray[np.floating]:
        if self._length is None:
            raise MissingContextError("UNet.backward called without a train-mode forward pass")
        length, self._length = self._length, None
        padded_len = -(-length // self.spec.multiple) * self.spec.multiple
        g = np.pad(grad, ((0, 0), (0, 0), (0, padded_len - length))) if padded_len != length else grad

        g = self.blocks["head"].backward(g)
        skip_grads: dict[int, npt.NDArray[np.floating]] = {}
        for level in range(self.spec.depth):
            g = self.blocks[f"dec{level}"].backward(g)
            width = self.spec.width(level)
            g, skip_grads[level] = g[:, :width], g[:, width:]
            g = self.upsample.backward(self.blocks[f"up{level}"].backward(g))
        g = self.blocks["bottleneck"].backward(g)
        for level in reversed(range(self.spec.depth)):
            g = self._pools[level].backward(g) + skip_grads[level]
            g = self.blocks[f"enc{level}"].backward(g)
        return g[:, :, :length]

    def children(self) -> Sequence[tuple[str, Module]]:
        return list(self.blocks.items())

    def describe(self) -> dict[str, Any]:
        return {
            "type": self.kind,
            "spec": self.spec.to_dict(),
            "blocks": {name: block.describe() for name, block in self.blocks.items()},
        }

    @classmethod
    def from_descriptor(cls, descriptor: Mapping[str, Any]) -> "UNet":
        spec = UnetSpec.from_dict(descriptor["spec"])
        blocks = {name: build_module(item) for name, item in descriptor["blocks"].items()}
        return cls(spec, blocks=blocks)


def build_unet(spec: UnetSpec | None = None, *, seed: int = 0) -> UNet:
    model = UNet(spec or UnetSpec(), seed=seed)
    LOGGER.debug("Built U-Net with %d parameters", model.parameter_count())
    return model


def unet_denoise_batch(model: UNet, frames: Sequence[IqFrame], *, batch_size: int = 16) -> list[IqFrame]:
    """Denoise every frame; each is brought to unit power on the way in and rescaled on the way out."""

    dtype = model.blocks["head"].weight.dtype
    batch, scales = frames_to_batch(frames, dtype=dtype)
    outputs = predict(model, batch, batch_size=batch_size)
    return batch_to_frames(outputs, scales, sps=frames[0].sps)


def unet_denoise(model: UNet, mixture: IqFrame) -> IqFrame:
    """Return the U-Net estimate of the SOI contained in ``mixture``."""

    return unet_denoise_batch(model, [mixture])[0]


def recover_bits_from_denoised(estimate: IqFrame, shape: PulseShape) -> BitArray:
    """Matched-filter and hard-decide the SOI symbols fully contained in ``estimate``."""

    return demodulate_contained(estimate, shape)
