"""Minimal numpy neural-network engine: layers, losses, Adam and checkpoints."""

from .checkpoint import (
    CHECKPOINT_VERSION,
    Checkpoint,
    decode_checkpoint,
    encode_checkpoint,
    load_checkpoint,
    save_checkpoint,
)
from .exceptions import CheckpointError, CheckpointVersionError, InvalidTensorError, MissingContextError, NnError
from .functional import (
    BATCHNORM_EPS,
    BatchNormState,
    batchnorm1d_forward,
    batchnorm_backward,
    conv1d_backward,
    conv1d_forward,
    dense_backward,
    dense_forward,
    maxpool1d_forward,
    mse_loss,
    pool_backward,
    relu_backward,
    relu_forward,
    softmax,
    softmax_cross_entropy,
    upsample1d_backward,
    upsample1d_forward,
)
from .gradcheck import GradientCheckResult, gradient_check
from .layers import (
    BatchNorm1d,
    Conv1d,
    Dense,
    Flatten,
    MaxPool1d,
    Module,
    ReLU,
    Sequential,
    Upsample1d,
    build_module,
    register_module,
)
from .optim import AdamState, adam_step
from .tensor import DEFAULT_DTYPE, Tensor, as_tensor, check_finite
from .training import TrainConfig, TrainResult, predict, train_epochs

__all__ = [
    "AdamState",
    "BATCHNORM_EPS",
    "BatchNorm1d",
    "BatchNormState",
    "CHECKPOINT_VERSION",
    "Checkpoint",
    "CheckpointError",
    "CheckpointVersionError",
    "Conv1d",
    "DEFAULT_DTYPE",
    "Dense",
    "Flatten",
    "GradientCheckResult",
    "InvalidTensorError",
    "MaxPool1d",
    "MissingContextError",
    "Module",
    "NnError",
    "ReLU",
    "Sequential",
    "Tensor",
    "TrainConfig",
    "TrainResult",
    "Upsample1d",
    "adam_step",
    "as_tensor",
    "batchnorm1d_forward",
    "batchnorm_backward",
    "build_module",
    "check_finite",
    "conv1d_backward",
    "conv1d_forward",
    "decode_checkpoint",
    "dense_backward",
    "dense_forward",
    "encode_checkpoint",
    "gradient_check",
    "load_checkpoint",
    "maxpool1d_forward",
    "mse_loss",
    "pool_backward",
    "predict",
    "register_module",
    "relu_backward",
    "relu_forward",
    "save_checkpoint",
    "softmax",
    "softmax_cross_entropy",
    "train_epochs",
    "upsample1d_backward",
    "upsample1d_forward",
]
