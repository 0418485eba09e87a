"""Precondition checks for successive interference cancellation."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

from ..dsp import SUPPORTED_SPS, IqFrame
from .exceptions import InvalidSicInputError

if TYPE_CHECKING:
    from .cancel import SicConfig


def validate_sic_config(config: "SicConfig") -> None:
    for name in ("soi_sps", "interferer_sps"):
        value = getattr(config, name)
        if value not in SUPPORTED_SPS:
            raise InvalidSicInputError(f"{name}={value} is not one of {SUPPORTED_SPS}")
    if not math.isfinite(config.sir_est_db):
        raise InvalidSicInputError(f"SIR estimate must be finite, got {config.sir_est_db}")
    if config.max_passes != 1:
        raise InvalidSicInputError("Only single-pass cancellation is supported (max_passes=1)")
    if config.power_reference not in ("mixture", "soi"):
        raise InvalidSicInputError(f"Unknown power reference {config.power_reference!r}")
    if config.soi_power <= 0.0 or not math.isfinite(config.soi_power):
        raise InvalidSicInputError("soi_power must be a positive finite number")


def validate_mixture(mixture: IqFrame, config: "SicConfig") -> None:
    if config.frame_len is not None and len(mixture) != config.frame_len:
        raise InvalidSicInputError(f"Mixture has {len(mixture)} samples, expected {config.frame_len}")
    if mixture.sps is not None and mixture.sps != config.soi_sps:
        raise InvalidSicInputError(f"Mixture is tagged sps={mixture.sps}, configuration expects {config.soi_sps}")
