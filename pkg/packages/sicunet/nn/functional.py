"""Forward and backward kernels for the fixed layer set.

Every ``*_forward`` returns ``(output, context)``; the matching
``*_backward`` consumes the upstream gradient and that context. Passing
``None`` as context raises :class:`MissingContextError`.
"""

from __future__ import annotations

import dataclasses
from typing import Literal

import numpy as np
import numpy.typing as npt
from numpy.lib.stride_tricks import sliding_window_view

from .exceptions import InvalidTensorError, MissingContextError
from .tensor import Tensor, require_rank

BatchNormMode = Literal["train", "infer"]

BATCHNORM_EPS = 1e-5


def _require_context(context: object, op: str) -> None:
    if context is None:
        raise MissingContextError(f"{op} requires the context returned by the matching forward call")


# --------------------------------------------------------------------- conv1d


@dataclasses.dataclass(slots=True)
class Conv1dContext:
    windows: Tensor
    kernels: Tensor
    input_shape: tuple[int, ...]
    stride: int
    padding: int


def conv1d_forward(
    x: Tensor,
    kernels: Tensor,
    bias: Tensor | None = None,
    stride: int = 1,
    padding: int = 0,
) -> tuple[Tensor, Conv1dContext]:
    """Cross-correlate ``x`` (``B × C_in × L``) with ``kernels`` (``C_out × C_in × k``).

    The output length is ``⌊(L + 2·padding − k) / stride⌋ + 1``.
    """

    require_rank(x, 3, "conv1d input")
    require_rank(kernels, 3, "conv1d kernels")
    batch, channels, length = x.shape
    out_channels, in_channels, k = kernels.shape
    if in_channels != channels:
        raise InvalidTensorError(f"conv1d expects {in_channels} input channels, got {channels}")
    if stride < 1 or padding < 0:
        raise InvalidTensorError(f"Invalid stride/padding: {stride}/{padding}")
    if k > length + 2 * padding:
        raise InvalidTensorError(f"Kernel of width {k} exceeds padded length {length + 2 * padding}")
    if bias is not None and bias.shape != (out_channels,):
        raise InvalidTensorError(f"conv1d bias must have shape ({out_channels},), got {bias.shape}")

    padded = np.pad(x, ((0, 0), (0, 0), (padding, padding))) if padding else x
    windows = sliding_window_view(padded, k, axis=2)[:, :, ::stride, :]
    out = np.tensordot(windows, kernels, axes=([1, 3], [1, 2])).transpose(0, 2, 1)
    if bias is not None:
        out = out + bias[None, :, None]
    context = Conv1dContext(windows=windows, kernels=kernels, input_shape=x.shape, stride=stride, padding=padding)
    return np.ascontiguousarray(out), context


def conv1d_backward(grad: Tensor, context: Conv1dContext | None) -> tuple[Tensor, Tensor, Tensor]:
    """Return ``(d_input, d_kernels, d_bias)`` for :func:`conv1d_forward`."""

    _require_context(context, "conv1d_backward")
    windows, kernels = context.windows, context.kernels
    batch, channels, length = context.input_shape
    k = kernels.shape[2]
    out_len = grad.shape[2]

    d_kernels = np.tensordot(grad, windows, axes=([0, 2], [0, 2]))
    d_bias = grad.sum(axis=(0, 2))
    d_windows = np.tensordot(grad, kernels, axes=([1], [0]))  # B × L_out × C_in × k

    padded_len = length + 2 * context.padding
    d_padded = np.zeros((batch, channels, padded_len), dtype=grad.dtype)
    span = context.stride * (out_len - 1) + 1
    for tap in range(k):
        d_padded[:, :, tap : tap + span : context.stride] += d_windows[:, :, :, tap].transpose(0, 2, 1)
    d_input = d_padded[:, :, context.padding : context.padding + length]
    return np.ascontiguousarray(d_input), d_kernels, d_bias


# ---------------------------------------------------------------------- dense


@dataclasses.dataclass(slots=True)
class DenseContext:
    inputs: Tensor
    weight: Tensor


def dense_forward(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> tuple[Tensor, DenseContext]:
    """Affine map ``x @ weight.T + bias`` for ``x`` of shape ``B × F``."""

    require_rank(x, 2, "dense input")
    if weight.shape[1] != x.shape[1]:
        raise InvalidTensorError(f"dense expects {weight.shape[1]} features, got {x.shape[1]}")
    out = x @ weight.T
    if bias is not None:
        out = out + bias
    return out, DenseContext(inputs=x, weight=weight)


def dense_backward(grad: Tensor, context: DenseContext | None) -> tuple[Tensor, Tensor, Tensor]:
    _require_context(context, "dense_backward")
    return grad @ context.weight, grad.T @ context.inputs, grad.sum(axis=0)


# ----------------------------------------------------------------- batch norm


@dataclasses.dataclass(slots=True)
class BatchNormState:
    """Affine parameters and running statistics of a batch-norm layer."""

    gamma: Tensor
    beta: Tensor
    running_mean: Tensor
    running_var: Tensor
    momentum: float = 0.1
    eps: float = BATCHNORM_EPS
    mode: BatchNormMode = "train"

    @classmethod
    def create(cls, channels: int, dtype: npt.DTypeLike = np.float64, **kwargs: object) -> "BatchNormState":
        return cls(
            gamma=np.ones(channels, dtype=dtype),
            beta=np.zeros(channels, dtype=dtype),
            running_mean=np.zeros(channels, dtype=dtype),
            running_var=np.ones(channels, dtype=dtype),
            **kwargs,  # type: ignore[arg-type]
        )


@dataclasses.dataclass(slots=True)
class BatchNormContext:
    normalized: Tensor
    inv_std: Tensor
    gamma: Tensor
    axes: tuple[int, ...]


def _bn_view(vector: Tensor, ndim: int) -> Tensor:
    return vector[None, :, None] if ndim == 3 else vector[None, :]


def batchnorm1d_forward(x: Tensor, state: BatchNormState) -> tuple[Tensor, BatchNormContext | None]:
    """Normalise each channel of ``x`` (``B × C × L`` or ``B × C``).

    In train mode the batch statistics are used and the running statistics
    are updated; in infer mode only the running statistics are used and no
    context is returned.
    """

    if x.ndim not in (2, 3):
        raise InvalidTensorError(f"batchnorm expects rank 2 or 3 input, got shape {x.shape}")
    if x.shape[1] != state.gamma.shape[0]:
        raise InvalidTensorError(f"batchnorm expects {state.gamma.shape[0]} channels, got {x.shape[1]}")
    axes = (0, 2) if x.ndim == 3 else (0,)

    if state.mode == "infer":
        inv_std = 1.0 / np.sqrt(state.running_var + state.eps)
        normalized = (x - _bn_view(state.running_mean, x.ndim)) * _bn_view(inv_std, x.ndim)
        return normalized * _bn_view(state.gamma, x.ndim) + _bn_view(state.beta, x.ndim), None

    if x.shape[0] < 2:
        raise InvalidTensorError("batchnorm in train mode needs a batch of at least 2")
    mean = x.mean(axis=axes)
    var = x.var(axis=axes)
    inv_std = 1.0 / np.sqrt(var + state.eps)
    normalized = (x - _bn_view(mean, x.ndim)) * _bn_view(inv_std, x.ndim)

    count = x.size // x.shape[1]
    unbiased = var * (count / max(count - 1, 1))
    state.running_mean = (1.0 - state.momentum) * state.running_mean + state.momentum * mean
    state.running_var = (1.0 - state.momentum) * state.running_var + state.momentum * unbiased

    out = normalized * _bn_view(state.gamma, x.ndim) + _bn_view(state.beta, x.ndim)
    return out, BatchNormContext(normalized=normalized, inv_std=inv_std, gamma=state.gamma, axes=axes)


def batchnorm_backward(grad: Tensor, context: BatchNormContext | None) -> tuple[Tensor, Tensor, Tensor]:
    """Return ``(d_input, d_gamma, d_beta)`` for a train-mode forward pass."""

    _require_context(context, "batchnorm_backward")
    ndim = grad.ndim
    axes = context.axes
    count = grad.size // grad.shape[1]
    d_beta = grad.sum(axis=axes)
    d_gamma = (grad * context.normalized).sum(axis=axes)
    scale = _bn_view(context.gamma * context.inv_std / count, ndim)
    d_input = scale * (
        count * grad - _bn_view(d_beta, ndim) - context.normalized * _bn_view(d_gamma, ndim)
    )
    return d_input, d_gamma, d_beta


# ---------------------------------------------------------------- activations


@dataclasses.dataclass(slots=True)
class ReluContext:
    mask: npt.NDArray[np.bool_]


def relu_forward(x: Tensor) -> tuple[Tensor, ReluContext]:
    mask = x > 0
    return np.where(mask, x, 0.0).astype(x.dtype, copy=False), ReluContext(mask=mask)


def relu_backward(grad: Tensor, context: ReluContext | None) -> Tensor:
    _require_context(context, "relu_backward")
    return np.where(context.mask, grad, 0.0).astype(grad.dtype, copy=False)


# ------------------------------------------------------------ pool / upsample


@dataclasses.dataclass(slots=True)
class PoolContext:
    argmax: npt.NDArray[np.intp]
    input_shape: tuple[int, ...]
    size: int


def maxpool1d_forward(x: Tensor, size: int) -> tuple[Tensor, PoolContext]:
    """Non-overlapping max pooling over the last axis; trailing samples that do not fill a window are dropped."""

    require_rank(x, 3, "maxpool1d input")
    batch, channels, length = x.shape
    out_len = length // size
    if size < 1 or out_len < 1:
        raise InvalidTensorError(f"Cannot pool length {length} with window {size}")
    blocks = x[:, :, : out_len * size].reshape(batch, channels, out_len, size)
    argmax = blocks.argmax(axis=3)
    out = np.take_along_axis(blocks, argmax[..., None], axis=3)[..., 0]
    return out, PoolContext(argmax=argmax, input_shape=x.shape, size=size)


def pool_backward(grad: Tensor, context: PoolContext | None) -> Tensor:
    _require_context(context, "pool_backward")
    batch, channels, length = context.input_shape
    out_len = grad.shape[2]
    blocks = np.zeros((batch, channels, out_len, context.size), dtype=grad.dtype)
    np.put_along_axis(blocks, context.argmax[..., None], grad[..., None], axis=3)
    d_input = np.zeros(context.input_shape, dtype=grad.dtype)
    d_input[:, :, : out_len * context.size] = blocks.reshape(batch, channels, -1)
    return d_input


def upsample1d_forward(x: Tensor, factor: int = 2) -> Tensor:
    """Nearest-neighbour upsampling along the last axis."""

    require_rank(x, 3, "upsample1d input")
    return np.repeat(x, factor, axis=2)


def upsample1d_backward(grad: Tensor, factor: int = 2) -> Tensor:
    batch, channels, length = grad.shape
    return grad.reshape(batch, channels, length // factor, factor).sum(axis=3)


# --------------------------------------------------------------------- losses


def softmax(logits: Tensor) -> Tensor:
    """Row-wise softmax with max subtraction."""

    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits: Tensor, labels: npt.ArrayLike) -> tuple[float, Tensor]:
    """Mean cross-entropy of ``logits`` (``B × K``) against integer ``labels``.

    Returns the loss and its gradient ``(softmax − one_hot) / B``.
    """

    require_rank(logits, 2, "softmax_cross_entropy logits")
    targets = np.asarray(labels, dtype=np.int64).reshape(-1)
    batch, classes = logits.shape
    if targets.shape[0] != batch:
        raise InvalidTensorError(f"Got {targets.shape[0]} labels for a batch of {batch}")
    if targets.size and (targets.min() < 0 or targets.max() >= classes):
        raise InvalidTensorError(f"Labels must lie in [0, {classes})")

    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm
    rows = np.arange(batch)
    loss = float(-log_probs[rows, targets].mean())
    grad = np.exp(log_probs)
    grad[rows, targets] -= 1.0
    grad /= batch
    return loss, grad


def mse_loss(prediction: Tensor, target: Tensor) -> tuple[float, Tensor]:
    """Mean squared error over every element and its gradient."""

    if prediction.shape != target.shape:
        raise InvalidTensorError(f"Shape mismatch: {prediction.shape} vs {target.shape}")
    diff = prediction - target
    return float(np.mean(diff * diff)), (2.0 / diff.size) * diff
