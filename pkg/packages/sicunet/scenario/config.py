"""Scenario configuration and label conventions."""

from __future__ import annotations

import dataclasses
import math
from typing import Any, Mapping, Sequence

from ..dsp import DEFAULT_ROLL_OFF, DEFAULT_SPAN_SYMBOLS, PulseShape, design_rrc
from .validators import validate_scenario_config

DEFAULT_FRAME_LEN = 8073
DEFAULT_SOI_SPS = 16
DEFAULT_INTERFERER_SPS: tuple[int, ...] = (32, 16, 4)
DEFAULT_SIR_BINS_DB: tuple[int, ...] = tuple(range(-10, 11))


@dataclasses.dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """Parameters of one labelled mixture dataset.

    ``interferer_sps_set`` is ordered: its position defines the SPS class
    index. ``sir_bins_db`` likewise defines the SIR class index.
    """

    frame_len: int = DEFAULT_FRAME_LEN
    soi_sps: int = DEFAULT_SOI_SPS
    interferer_sps_set: tuple[int, ...] = DEFAULT_INTERFERER_SPS
    sir_bins_db: tuple[int, ...] = DEFAULT_SIR_BINS_DB
    examples_per_bin: int = 100
    fractional_offsets: bool = False
    offset_range_db: tuple[float, float] = (-0.5, 0.5)
    snr_db: float | None = None
    seed: int = 0
    roll_off: float = DEFAULT_ROLL_OFF
    span_symbols: int = DEFAULT_SPAN_SYMBOLS

    def __post_init__(self) -> None:
        object.__setattr__(self, "interferer_sps_set", tuple(int(s) for s in self.interferer_sps_set))
        object.__setattr__(self, "sir_bins_db", tuple(int(b) for b in self.sir_bins_db))
        object.__setattr__(self, "offset_range_db", tuple(float(v) for v in self.offset_range_db))
        validate_scenario_config(self)

    @property
    def num_sps_classes(self) -> int:
        return len(self.interferer_sps_set)

    @property
    def num_sir_classes(self) -> int:
        return len(self.sir_bins_db)

    @property
    def example_count(self) -> int:
        return self.num_sir_classes * self.num_sps_classes * self.examples_per_bin

    def sps_class(self, sps: int) -> int:
        return self.interferer_sps_set.index(sps)

    def sps_for_class(self, index: int) -> int:
        return self.interferer_sps_set[index]

    def sir_db_for_class(self, index: int) -> int:
        return self.sir_bins_db[index]

    def soi_shape(self) -> PulseShape:
        return design_rrc(self.roll_off, self.span_symbols, self.soi_sps)

    def shape_for(self, sps: int) -> PulseShape:
        return design_rrc(self.roll_off, self.span_symbols, sps)

    def replace(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        payload = dataclasses.asdict(self)
        payload["interferer_sps_set"] = list(self.interferer_sps_set)
        payload["sir_bins_db"] = list(self.sir_bins_db)
        payload["offset_range_db"] = list(self.offset_range_db)
        return payload

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "ScenarioConfig":
        known = {field.name for field in dataclasses.fields(cls)}
        kwargs = {key: value for key, value in payload.items() if key in known}
        for key in ("interferer_sps_set", "sir_bins_db", "offset_range_db"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


def round_half_away(value: float) -> int:
    return int(math.copysign(math.floor(abs(value) + 0.5), value))


def nearest_sir_bin(sir_db: float, bins_db: Sequence[int] = DEFAULT_SIR_BINS_DB) -> int:
    """Return the class index of the SIR bin nearest to ``sir_db``.

    The value is rounded half away from zero to whole dB, clamped to the bin
    range, then mapped to the closest bin (lowest index on ties).
    """

    rounded = round_half_away(sir_db)
    clamped = min(max(rounded, bins_db[0]), bins_db[-1])
    distances = [abs(clamped - b) for b in bins_db]
    return distances.index(min(distances))
