"""Tensor conventions for the neural-network engine.

Tensors are plain contiguous :class:`numpy.ndarray` objects of a floating
dtype. Activations are laid out ``batch × channels × length``; dense layers
take ``batch × features``.
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidTensorError

Tensor = npt.NDArray[np.floating]

DEFAULT_DTYPE = np.float64


def as_tensor(values: npt.ArrayLike, dtype: npt.DTypeLike | None = None) -> Tensor:
    """Return *values* as a contiguous floating tensor, rejecting non-finite data."""

    array = np.ascontiguousarray(values, dtype=dtype or DEFAULT_DTYPE)
    if not np.issubdtype(array.dtype, np.floating):
        raise InvalidTensorError(f"Tensors must be floating point, got {array.dtype}")
    check_finite(array)
    return array


def check_finite(tensor: Tensor, what: str = "tensor") -> None:
    if not np.all(np.isfinite(tensor)):
        raise InvalidTensorError(f"Non-finite values in {what}")


def require_rank(tensor: Tensor, rank: int, what: str) -> None:
    if tensor.ndim != rank:
        raise InvalidTensorError(f"{what} expects a rank-{rank} tensor, got shape {tensor.shape}")
