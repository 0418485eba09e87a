"""Deterministic minibatch training loop shared by every model in the package."""

from __future__ import annotations

import dataclasses
import logging
from typing import Any, Callable, Literal, Mapping

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidTensorError
from .functional import mse_loss, softmax_cross_entropy
from .layers import Module
from .optim import AdamState, adam_step
from .tensor import Tensor, check_finite

LOGGER = logging.getLogger("sicunet.nn")

LossName = Literal["cross_entropy", "mse"]

EpochCallback = Callable[[int, float, "float | None"], None]


@dataclasses.dataclass(slots=True, frozen=True)
class TrainConfig:
    """Hyper-parameters of one training run."""

    epochs: int = 10
    batch_size: int = 32
    lr: float = 1e-3
    seed: int = 0
    dtype: str = "float32"
    track_accuracy: bool = True

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise InvalidTensorError("epochs must be at least 1")
        if self.batch_size < 1:
            raise InvalidTensorError("batch_size must be at least 1")
        if not np.isfinite(self.lr) or self.lr < 0:
            raise InvalidTensorError("lr must be a finite, non-negative number")
        if np.dtype(self.dtype).kind != "f":
            raise InvalidTensorError(f"dtype must be a floating type, got {self.dtype!r}")

    def replace(self, **changes: Any) -> "TrainConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "TrainConfig":
        known = {field.name for field in dataclasses.fields(cls)}
        return cls(**{key: value for key, value in payload.items() if key in known})


@dataclasses.dataclass(slots=True)
class TrainResult:
    loss_history: list[float]
    accuracy_history: list[float]
    steps: int
    config: TrainConfig

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1]

    @property
    def final_accuracy(self) -> float | None:
        return self.accuracy_history[-1] if self.accuracy_history else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "loss_history": list(self.loss_history),
            "accuracy_history": list(self.accuracy_history),
            "steps": self.steps,
            "config": self.config.to_dict(),
        }


def _batches(order: npt.NDArray[np.intp], batch_size: int) -> list[npt.NDArray[np.intp]]:
    # Never yield a batch smaller than batch_size unless the whole set is smaller.
    chunks = max(1, order.size // batch_size)
    return np.array_split(order, chunks)


def predict(model: Module, inputs: Tensor, *, batch_size: int = 64) -> Tensor:
    """Run *model* over *inputs* in infer mode and return the stacked outputs."""

    if inputs.shape[0] == 0:
        raise InvalidTensorError("Cannot predict on an empty batch")
    previous = model.mode
    if previous != "infer":
        model.set_mode("infer")
    try:
        outputs = [model.forward(inputs[start : start + batch_size]) for start in range(0, inputs.shape[0], batch_size)]
    finally:
        if previous != "infer":
            model.set_mode(previous)
    return np.concatenate(outputs, axis=0)


def _accuracy(model: Module, inputs: Tensor, labels: npt.NDArray[np.int64], batch_size: int) -> float:
    logits = predict(model, inputs, batch_size=max(batch_size, 64))
    return float(np.mean(np.argmax(logits, axis=1) == labels))


def train_epochs(
    model: Module,
    inputs: npt.ArrayLike,
    targets: npt.ArrayLike,
    config: TrainConfig,
    *,
    loss: LossName = "cross_entropy",
    on_epoch: EpochCallback | None = None,
) -> TrainResult:
    """Train *model* in place with Adam and return the per-epoch history.

    ``targets`` holds integer class labels for ``loss="cross_entropy"`` and
    tensors shaped like the model output for ``loss="mse"``. Shuffling uses
    ``numpy.random.default_rng(config.seed)`` so equal seeds reproduce the
    same parameters.
    """

    dtype = np.dtype(config.dtype)
    data = np.ascontiguousarray(inputs, dtype=dtype)
    if data.ndim == 0 or data.shape[0] == 0:
        raise InvalidTensorError("Cannot train on an empty dataset")
    check_finite(data, "training inputs")
    if loss == "cross_entropy":
        labels = np.asarray(targets, dtype=np.int64).reshape(-1)
    elif loss == "mse":
        labels = np.ascontiguousarray(targets, dtype=dtype)
    else:
        raise InvalidTensorError(f"Unknown loss {loss!r}")
    if labels.shape[0] != data.shape[0]:
        raise InvalidTensorError(f"Got {labels.shape[0]} targets for {data.shape[0]} inputs")

    model.astype(dtype)
    model.set_mode("train")
    rng = np.random.default_rng(config.seed)
    state = AdamState(lr=config.lr)
    loss_history: list[float] = []
    accuracy_history: list[float] = []
    steps = 0

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(data.shape[0])
        total = 0.0
        for batch in _batches(order, config.batch_size):
            output = model.forward(data[batch])
            if loss == "cross_entropy":
                value, grad = softmax_cross_entropy(output, labels[batch])
            else:
                value, grad = mse_loss(output, labels[batch])
            model.backward(grad.astype(dtype, copy=False))
            adam_step(dict(model.named_parameters()), dict(model.named_gradients()), state)
            total += value * batch.size
            steps += 1
        epoch_loss = total / data.shape[0]
        if not np.isfinite(epoch_loss):
            raise InvalidTensorError(f"Training diverged at epoch {epoch}")
        loss_history.append(epoch_loss)

        accuracy: float | None = None
        if loss == "cross_entropy" and config.track_accuracy:
            accuracy = _accuracy(model, data, labels, config.batch_size)
            accuracy_history.append(accuracy)
        LOGGER.info(
            "Epoch %d/%d loss=%.5f%s",
            epoch,
            config.epochs,
            epoch_loss,
            "" if accuracy is None else f" accuracy={accuracy:.4f}",
        )
        if on_epoch is not None:
            on_epoch(epoch, epoch_loss, accuracy)

    model.set_mode("infer")
    return TrainResult(loss_history=loss_history, accuracy_history=accuracy_history, steps=steps, config=config)
