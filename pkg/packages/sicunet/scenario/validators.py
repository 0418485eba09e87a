"""Validation helpers for the :mod:`sicunet.scenario` package."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

from ..dsp import SUPPORTED_SPS
from .exceptions import InvalidScenarioError

if TYPE_CHECKING:  # pragma: no cover
    from .config import ScenarioConfig


def validate_scenario_config(config: "ScenarioConfig") -> None:
    """Raise :class:`InvalidScenarioError` when *config* breaks an invariant."""

    if config.soi_sps < 2:
        raise InvalidScenarioError(f"SOI samples per symbol must be >= 2, got {config.soi_sps}")
    if not config.interferer_sps_set:
        raise InvalidScenarioError("At least one interferer SPS is required")
    if len(set(config.interferer_sps_set)) != len(config.interferer_sps_set):
        raise InvalidScenarioError(f"Interferer SPS values must be unique: {config.interferer_sps_set}")
    unsupported = [sps for sps in config.interferer_sps_set if sps not in SUPPORTED_SPS]
    if unsupported:
        raise InvalidScenarioError(f"Unsupported interferer SPS values: {unsupported}")
    longest = max((config.soi_sps, *config.interferer_sps_set))
    if config.frame_len < config.soi_sps * 8 or config.frame_len < (config.span_symbols + 1) * longest:
        raise InvalidScenarioError(
            f"Frame length {config.frame_len} is too short for sps={longest} and span={config.span_symbols}"
        )
    bins = list(config.sir_bins_db)
    if not bins or bins != sorted(set(bins)):
        raise InvalidScenarioError(f"SIR bins must be sorted and unique: {config.sir_bins_db}")
    if config.examples_per_bin < 1:
        raise InvalidScenarioError(f"examples_per_bin must be >= 1, got {config.examples_per_bin}")
    low, high = config.offset_range_db
    if not math.isclose(low, -high, abs_tol=1e-12) or high < 0:
        raise InvalidScenarioError(f"Offset range must be symmetric about 0, got {config.offset_range_db}")
    if config.snr_db is not None and not math.isfinite(config.snr_db):
        raise InvalidScenarioError(f"SNR must be finite when set, got {config.snr_db}")
    if not 0 <= config.seed < 2**64:
        raise InvalidScenarioError(f"Seed must be an unsigned 64-bit integer, got {config.seed}")


def validate_generation_request(config: "ScenarioConfig", sir_db: float, interferer_sps: int) -> None:
    if interferer_sps not in config.interferer_sps_set:
        raise InvalidScenarioError(
            f"Interferer SPS {interferer_sps} is not in the configured set {config.interferer_sps_set}"
        )
    margin = max(abs(v) for v in config.offset_range_db) if config.fractional_offsets else 0.0
    low = config.sir_bins_db[0] - margin - 1e-9
    high = config.sir_bins_db[-1] + margin + 1e-9
    if not math.isfinite(sir_db) or not low <= sir_db <= high:
        raise InvalidScenarioError(f"SIR {sir_db} dB lies outside [{low:.3f}, {high:.3f}] dB")
