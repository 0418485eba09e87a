"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

import dataclasses

import numpy as np

from .layers import Module
from .tensor import Tensor


@dataclasses.dataclass(slots=True, frozen=True)
class GradientCheckResult:
    input_error: float
    parameter_errors: dict[str, float]

    @property
    def max_error(self) -> float:
        return max([self.input_error, *self.parameter_errors.values()])

    def passed(self, tolerance: float = 1e-4) -> bool:
        return self.max_error < tolerance


def _relative_error(analytic: Tensor, numeric: Tensor) -> float:
    if analytic.size == 0:
        return 0.0
    return float(np.max(np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))))


def _numeric_gradient(objective, target: Tensor, h: float) -> Tensor:
    grad = np.zeros_like(target)
    flat = target.reshape(-1)
    out = grad.reshape(-1)
    for index in range(flat.size):
        original = flat[index]
        flat[index] = original + h
        plus = objective()
        flat[index] = original - h
        minus = objective()
        flat[index] = original
        out[index] = (plus - minus) / (2.0 * h)
    return grad


def gradient_check(module: Module, x: Tensor, *, h: float = 1e-5, seed: int = 0) -> GradientCheckResult:
    """Compare ``module.backward`` against central differences of a random projection.

    The scalar objective is ``sum(module(x) * g)`` for a fixed random ``g``;
    errors are ``|analytic − numeric| / max(1, |analytic|)``. The module is
    run in train mode and cast to float64.
    """

    module.astype(np.float64).set_mode("train")
    x = np.array(x, dtype=np.float64)
    projection = np.random.default_rng(seed).standard_normal(module.forward(x).shape)

    def objective() -> float:
        return float(np.sum(module.forward(x) * projection))

    module.forward(x)
    d_input = module.backward(projection)
    analytic = {name: grad.copy() for name, grad in module.named_gradients()}

    input_error = _relative_error(d_input, _numeric_gradient(objective, x, h))
    parameters = dict(module.named_parameters())
    errors = {
        name: _relative_error(analytic[name], _numeric_gradient(objective, parameters[name], h))
        for name in parameters
    }
    return GradientCheckResult(input_error=input_error, parameter_errors=errors)
