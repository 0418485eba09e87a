"""Stateful layer objects built on :mod:`sicunet.nn.functional`."""

from __future__ import annotations

import math
from typing import Any, Callable, Iterator, Literal, Mapping, Sequence

import numpy as np
import numpy.typing as npt

from . import functional as F
from .exceptions import InvalidTensorError, MissingContextError
from .tensor import DEFAULT_DTYPE, Tensor

Mode = Literal["train", "infer"]

_MODULE_TYPES: dict[str, Callable[[Mapping[str, Any]], "Module"]] = {}


def register_module(kind: str) -> Callable[[type["Module"]], type["Module"]]:
    """Class decorator registering a module type for :func:`build_module`."""

    def decorator(cls: type["Module"]) -> type["Module"]:
        cls.kind = kind
        _MODULE_TYPES[kind] = cls.from_descriptor
        return cls

    return decorator


def build_module(descriptor: Mapping[str, Any]) -> "Module":
    """Instantiate a module from the dictionary returned by :meth:`Module.describe`."""

    kind = descriptor.get("type")
    if kind not in _MODULE_TYPES:
        raise InvalidTensorError(f"Unknown module type {kind!r}")
    return _MODULE_TYPES[kind](descriptor)


def kaiming_uniform(shape: tuple[int, ...], fan_in: int, rng: np.random.Generator, dtype: npt.DTypeLike) -> Tensor:
    bound = math.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Module:
    """Base class: a differentiable block with named parameters and buffers.

    Forward contexts are cached only in train mode, so a model in infer mode
    never mutates itself and may be shared between threads.
    """

    kind = "module"

    def __init__(self) -> None:
        self.mode: Mode = "train"

    # subclasses override ------------------------------------------------
    def forward(self, x: Tensor) -> Tensor:  # pragma: no cover - abstract
        raise NotImplementedError

    def backward(self, grad: Tensor) -> Tensor:  # pragma: no cover - abstract
        raise NotImplementedError

    def describe(self) -> dict[str, Any]:
        return {"type": self.kind}

    @classmethod
    def from_descriptor(cls, descriptor: Mapping[str, Any]) -> "Module":
        return cls()

    def parameters(self) -> dict[str, Tensor]:
        return {}

    def gradients(self) -> dict[str, Tensor]:
        return {}

    def buffers(self) -> dict[str, Tensor]:
        return {}

    def set_buffer(self, name: str, value: Tensor) -> None:
        raise KeyError(name)

    def children(self) -> Sequence[tuple[str, "Module"]]:
        return ()

    # shared behaviour --------------------------------------------------
    def __call__(self, x: Tensor) -> Tensor:
        return self.forward(x)

    @property
    def training(self) -> bool:
        return self.mode == "train"

    def set_mode(self, mode: Mode) -> "Module":
        self.mode = mode
        for _, child in self.children():
            child.set_mode(mode)
        return self

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Tensor]]:
        for name, value in self.parameters().items():
            yield prefix + name, value
        for child_name, child in self.children():
            yield from child.named_parameters(f"{prefix}{child_name}.")

    def named_gradients(self, prefix: str = "") -> Iterator[tuple[str, Tensor]]:
        for name, value in self.gradients().items():
            yield prefix + name, value
        for child_name, child in self.children():
            yield from child.named_gradients(f"{prefix}{child_name}.")

    def named_buffers(self, prefix: str = "") -> Iterator[tuple[str, Tensor]]:
        for name, value in self.buffers().items():
            yield prefix + name, value
        for child_name, child in self.children():
            yield from child.named_buffers(f"{prefix}{child_name}.")

    def state_dict(self) -> dict[str, Tensor]:
        """Parameters followed by buffers, in a stable order."""

        state = dict(self.named_parameters())
        state.update(self.named_buffers())
        return state

    def load_state_dict(self, state: Mapping[str, npt.ArrayLike]) -> None:
        expected = self.state_dict()
        missing = set(expected) - set(state)
        if missing:
            raise InvalidTensorError(f"Missing tensors in state: {sorted(missing)}")
        for name, current in expected.items():
            value = np.asarray(state[name], dtype=current.dtype)
            if value.shape != current.shape:
                raise InvalidTensorError(f"Tensor {name} has shape {value.shape}, expected {current.shape}")
            current[...] = value

    def astype(self, dtype: npt.DTypeLike) -> "Module":
        for child_name, child in self.children():
            child.astype(dtype)
        self._cast(np.dtype(dtype))
        return self

    def _cast(self, dtype: np.dtype) -> None:
        pass

    def parameter_count(self) -> int:
        return sum(int(value.size) for _, value in self.named_parameters())


def _missing(layer: Module) -> MissingContextError:
    return MissingContextError(f"{type(layer).__name__}.backward called without a train-mode forward pass")


@register_module("conv1d")
class Conv1d(Module):
    """1-D convolution; ``padding="same"`` keeps the length for odd kernels at stride 1."""

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        *,
        stride: int = 1,
        padding: int | Literal["same"] = "same",
        rng: np.random.Generator | None = None,
        dtype: npt.DTypeLike = DEFAULT_DTYPE,
    ) -> None:
        super().__init__()
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = (kernel_size - 1) // 2 if padding == "same" else int(padding)
        rng = rng or np.random.default_rng(0)
        fan_in = in_channels * kernel_size
        self.weight = kaiming_uniform((out_channels, in_channels, kernel_size), fan_in, rng, dtype)
        self.bias = np.zeros(out_channels, dtype=dtype)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)
        self._context: F.Conv1dContext | None = None

    def forward(self, x: Tensor) -> Tensor:
        out, context = F.conv1d_forward(x, self.weight, self.bias, self.stride, self.padding)
        self._context = context if self.training else None
        return out

    def backward(self, grad: Tensor) -> Tensor:
        if self._context is None:
            raise _missing(self)
        d_input, d_weight, d_bias = F.conv1d_backward(grad, self._context)
        self.grad_weight, self.grad_bias = d_weight, d_bias
        self._context = None
        return d_input

    def parameters(self) -> dict[str, Tensor]:
        return {"weight": self.weight, "bias": self.bias}

    def gradients(self) -> dict[str, Tensor]:
        return {"weight": self.grad_weight, "bias": self.grad_bias}

    def _cast(self, dtype: np.dtype) -> None:
        self.weight = self.weight.astype(dtype)
        self.bias = self.bias.astype(dtype)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)

    def describe(self) -> dict[str, Any]:
        return {
            "type": self.kind,
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
            "kernel_size": self.kernel_size,
            "stride": self.stride,
            "padding": self.padding,
        }

    @classmethod
    def from_descriptor(cls, descriptor: Mapping[str, Any]) -> "Conv1d":
        return cls(
            descriptor["in_channels"],
            descriptor["out_channels"],
            descriptor["kernel_size"],
            stride=descriptor.get("stride", 1),
            padding=descriptor.get("padding", "same"),
        )


@register_module("dense")
class Dense(Module):
    def __init__(
        self,
        in_features: int,
        out_features: int,
        *,
        rng: np.random.Generator | None = None,
        dtype: npt.DTypeLike = DEFAULT_DTYPE,
    ) -> None:
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        rng = rng or np.random.default_rng(0)
        self.weight = kaiming_uniform((out_features, in_features), in_features, rng, dtype)
        self.bias = np.zeros(out_features, dtype=dtype)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)
        self._context: F.DenseContext | None = None

    def forward(self, x: Tensor) -> Tensor:
        out, context = F.dense_forward(x, self.weight, self.bias)
        self._context = context if self.training else None
        return out

    def backward(self, grad: Tensor) -> Tensor:
        if self._context is None:
            raise _missing(self)
        d_input, d_weight, d_bias = F.dense_backward(grad, self._context)
        self.grad_weight, self.grad_bias = d_weight, d_bias
        self._context = None
        return d_input

    def parameters(self) -> dict[str, Tensor]:
        return {"weight": self.weight, "bias": self.bias}

    def gradients(self) -> dict[str, Tensor]:
        return {"weight": self.grad_weight, "bias": self.grad_bias}

    def _cast(self, dtype: np.dtype) -> None:
        self.weight = self.weight.astype(dtype)
        self.bias = self.bias.astype(dtype)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)

    def describe(self) -> dict[str, Any]:
        return {"type": self.kind, "in_features": self.in_features, "out_features": self.out_features}

    @classmethod
    def from_descriptor(cls, descriptor: Mapping[str, Any]) -> "Dense":
        return cls(descriptor["in_features"], descriptor["out_features"])


@register_module("batchnorm1d")
class BatchNorm1d(Module):
    def __init__(self, channels: int, *, momentum: float = 0.1, dtype: npt.DTypeLike = DEFAULT_DTYPE) -> None:
        super().__init__()
        self.channels = channels
        self.state = F.BatchNormState.create(channels, dtype=dtype, momentum=momentum)
        self.grad_gamma = np.zeros_like(self.state.gamma)
        self.grad_beta = np.zeros_like(self.state.beta)
        self._context: F.BatchNormContext | None = None

    def set_mode(self, mode: Mode) -> "BatchNorm1d":
        super().set_mode(mode)
        self.state.mode = mode
        return self

    def forward(self, x: Tensor) -> Tensor:
        out, context = F.batchnorm1d_forward(x, self.state)
        self._context = context
        return out

    def backward(self, grad: Tensor) -> Tensor:
        if self._context is None:
            raise _missing(self)
        d_input, self.grad_gamma, self.grad_beta = F.batchnorm_backward(grad, self._context)
        self._context = None
        return d_input

    def parameters(self) -> dict[str, Tensor]:
        return {"gamma": self.state.gamma, "beta": self.state.beta}

    def gradients(self) -> dict[str, Tensor]:
        return {"gamma": self.grad_gamma, "beta": self.grad_beta}

    def buffers(self) -> dict[str, Tensor]:
        return {"running_mean": self.state.running_mean, "running_var": self.state.running_var}

    def _cast(self, dtype: np.dtype) -> None:
        for field in ("gamma", "beta", "running_mean", "running_var"):
            setattr(self.state, field, getattr(self.state, field).astype(dtype))
        self.grad_gamma = np.zeros_like(self.state.gamma)
        self.grad_beta = np.zeros_like(self.state.beta)

    def describe(self) -> dict[str, Any]:
        return {"type": self.kind, "channels": self.channels, "momentum": self.state.momentum}

    @classmethod
    def from_descriptor(cls, descriptor: Mapping[str, Any]) -> "BatchNorm1d":
        return cls(descriptor["channels"], momentum=descriptor.get("momentum", 0.1))


@register_module("relu")
class ReLU(Module):
    def __init__(self) -> None:
        super().__init__()
        self._context: F.ReluContext | None = None

    def forward(self, x: Tensor) -> Tensor:
        out, context = F.relu_forward(x)
        self._context = context if self.training else None
        return out

    def backward(self, grad: Tensor) -> Tensor:
        if self._context is None:
            raise _missing(self)
        d_input = F.relu_backward(grad, self._context)
        self._context = None
        return d_input


@register_module("maxpool1d")
class MaxPool1d(Module):
    def __init__(self, size: int) -> None:
        super().__init__()
        self.size = size
        self._context: F.PoolContext | None = None

    def forward(self, x: Tensor) -> Tensor:
        out, context = F.maxpool1d_forward(x, self.size)
        self._context = context if self.training else None
        return out

    def backward(self, grad: Tensor) -> Tensor:
        if self._context is None:
            raise _missing(self)
        d_input = F.pool_backward(grad, self._context)
        self._context = None
        return d_input

    def describe(self) -> dict[str, Any]:
        return {"type": self.kind, "size": self.size}

    @classmethod
    def from_descriptor(cls, descriptor: Mapping[str, Any]) -> "MaxPool1d":
        return cls(descriptor["size"])


@register_module("upsample1d")
class Upsample1d(Module):
    def __init__(self, factor: int = 2) -> None:
        super().__init__()
        self.factor = factor

    def forward(self, x: Tensor) -> Tensor:
        return F.upsample1d_forward(x, self.factor)

    def backward(self, grad: Tensor) -> Tensor:
        return F.upsample1d_backward(grad, self.factor)

    def describe(self) -> dict[str, Any]:
        return {"type": self.kind, "factor": self.factor}

    @classmethod
    def from_descriptor(cls, descriptor: Mapping[str, Any]) -> "Upsample1d":
        return cls(descriptor.get("factor", 2))


@register_module("flatten")
class Flatten(Module):
    def __init__(self) -> None:
        super().__init__()
        self._shape: tuple[int, ...] | None = None

    def forward(self, x: Tensor) -> Tensor:
        if self.training:
            self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad: Tensor) -> Tensor:
        if self._shape is None:
            raise _missing(self)
        shape, self._shape = self._shape, None
        return grad.reshape(shape)


@register_module("sequential")
class Sequential(Module):
    def __init__(self, layers: Sequence[Module]) -> None:
        super().__init__()
        self.layers = list(layers)

    def forward(self, x: Tensor) -> Tensor:
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, grad: Tensor) -> Tensor:
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def children(self) -> Sequence[tuple[str, Module]]:
        return [(str(index), layer) for index, layer in enumerate(self.layers)]

    def describe(self) -> dict[str, Any]:
        return {"type": self.kind, "layers": [layer.describe() for layer in self.layers]}

    @classmethod
    def from_descriptor(cls, descriptor: Mapping[str, Any]) -> "Sequential":
        return cls([build_module(item) for item in descriptor["layers"]])
