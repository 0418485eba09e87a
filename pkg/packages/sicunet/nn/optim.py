"""Adam optimiser operating on named parameter dictionaries."""

from __future__ import annotations

import dataclasses
from typing import Mapping

import numpy as np

from .exceptions import InvalidTensorError
from .tensor import Tensor


@dataclasses.dataclass(slots=True)
class AdamState:
    """First/second moment accumulators keyed by parameter name."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, Tensor] = dataclasses.field(default_factory=dict)
    v: dict[str, Tensor] = dataclasses.field(default_factory=dict)


def adam_step(
    params: Mapping[str, Tensor],
    grads: Mapping[str, Tensor],
    state: AdamState,
) -> tuple[Mapping[str, Tensor], AdamState]:
    """Apply one bias-corrected Adam update to *params* in place.

    Moment buffers are created lazily on the first step a parameter is seen.
    """

    if set(params) != set(grads):
        raise InvalidTensorError(
            f"Parameter and gradient names differ: {sorted(set(params) ^ set(grads))}"
        )
    for name, param in params.items():
        if grads[name].shape != param.shape:
            raise InvalidTensorError(
                f"Gradient for {name} has shape {grads[name].shape}, expected {param.shape}"
            )

    state.t += 1
    correction1 = 1.0 - state.beta1**state.t
    correction2 = 1.0 - state.beta2**state.t

    for name, param in params.items():
        grad = grads[name]
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None or m.shape != param.shape:
            m = np.zeros_like(param)
            v = np.zeros_like(param)
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * (grad * grad)
        state.m[name], state.v[name] = m, v

        m_hat = m / correction1
        v_hat = v / correction2
        step = state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
        np.subtract(param, step.astype(param.dtype, copy=False), out=param)
    return params, state
