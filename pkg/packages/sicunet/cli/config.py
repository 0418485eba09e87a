"""Run configuration: built-in profiles, config files and flag overrides."""

from __future__ import annotations

import dataclasses
import json
import logging
from typing import Any, Literal, Mapping

from ..models import SUPPORTED_CLASS_COUNTS, ModelError, UnetSpec
from ..nn import NnError, TrainConfig
from ..scenario import ScenarioConfig, ScenarioError
from ..utils import PathLike, resolve_path
from .exceptions import ConfigError

LOGGER = logging.getLogger("sicunet.cli")

Profile = Literal["integer_sir", "fractional_sir"]
PROFILES: tuple[str, ...] = ("integer_sir", "fractional_sir")
TRAIN_STAGES: tuple[str, ...] = ("sps", "sir", "unet", "method")

_SEED_MODULUS = 2**64
_STAGE_SEED_OFFSETS = {"sps": 1, "sir": 2, "unet": 3, "method": 4}
_TEST_SEED_OFFSET = 1_000_003

_DEFAULT_TRAINING: dict[str, TrainConfig] = {
    "sps": TrainConfig(epochs=12, batch_size=32, lr=1e-3),
    "sir": TrainConfig(epochs=20, batch_size=32, lr=1e-3),
    "unet": TrainConfig(epochs=15, batch_size=16, lr=1e-3, track_accuracy=False),
    "method": TrainConfig(epochs=15, batch_size=32, lr=1e-3),
}


@dataclasses.dataclass(frozen=True, slots=True)
class RunConfig:
    """Everything one study needs, from dataset generation to evaluation.

    ``scenario`` describes the training set; the test set shares it except
    for ``test_examples_per_bin``, a seed derived from ``seed`` and, when
    ``test_fractional_offsets`` is set, its own fractional-offset switch.
    """

    profile: Profile = "integer_sir"
    seed: int = 0
    scenario: ScenarioConfig = dataclasses.field(default_factory=lambda: ScenarioConfig(examples_per_bin=15))
    test_examples_per_bin: int = 20
    training: Mapping[str, TrainConfig] = dataclasses.field(default_factory=lambda: dict(_DEFAULT_TRAINING))
    unet: UnetSpec = dataclasses.field(default_factory=UnetSpec)
    test_fractional_offsets: bool | None = None
    method_uses_sir: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if self.profile not in PROFILES:
            raise ConfigError(f"Unknown profile {self.profile!r}; choose one of {', '.join(PROFILES)}")
        if not 0 <= self.seed < _SEED_MODULUS:
            raise ConfigError(f"Seed must be an unsigned 64-bit integer, got {self.seed}")
        missing = [stage for stage in TRAIN_STAGES if stage not in self.training]
        if missing:
            raise ConfigError(f"No training configuration for stage(s): {', '.join(missing)}")
        if self.test_examples_per_bin < 1:
            raise ConfigError("test_examples_per_bin must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        for stage, count in (("sps", self.scenario.num_sps_classes), ("sir", self.scenario.num_sir_classes)):
            if count not in SUPPORTED_CLASS_COUNTS:
                raise ConfigError(
                    f"The {stage} classifier would need {count} classes; supported counts are "
                    f"{', '.join(map(str, SUPPORTED_CLASS_COUNTS))}"
                )

    def train_scenario(self) -> ScenarioConfig:
        return self.scenario.replace(seed=self.seed)

    def test_scenario(self) -> ScenarioConfig:
        return self.scenario.replace(
            seed=(self.seed + _TEST_SEED_OFFSET) % _SEED_MODULUS,
            examples_per_bin=self.test_examples_per_bin,
            fractional_offsets=self.test_fractional_offsets
            if self.test_fractional_offsets is not None
            else self.scenario.fractional_offsets,
        )

    def train_config(self, stage: str) -> TrainConfig:
        """Per-stage hyper-parameters with a seed derived from the run seed."""

        if stage not in TRAIN_STAGES:
            raise ConfigError(f"Unknown training stage {stage!r}")
        offset = _STAGE_SEED_OFFSETS[stage]
        return self.training[stage].replace(seed=(self.seed + offset) % _SEED_MODULUS)

    def replace(self, **changes: Any) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def with_training(self, stage: str, **changes: Any) -> "RunConfig":
        if stage not in TRAIN_STAGES:
            raise ConfigError(f"Unknown training stage {stage!r}")
        try:
            updated = self.training[stage].replace(**changes)
        except NnError as exc:
            raise ConfigError(f"Invalid {stage} training override: {exc}") from exc
        return self.replace(training={**self.training, stage: updated})

    def to_dict(self) -> dict[str, Any]:
        return {
            "profile": self.profile,
            "seed": self.seed,
            "scenario": self.scenario.to_dict(),
            "test_examples_per_bin": self.test_examples_per_bin,
            "test_fractional_offsets": self.test_fractional_offsets,
            "training": {stage: self.training[stage].to_dict() for stage in TRAIN_STAGES},
            "unet": self.unet.to_dict(),
            "method_uses_sir": self.method_uses_sir,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any], base: "RunConfig | None" = None) -> "RunConfig":
        """Layer ``payload`` over ``base``; keys absent from ``payload`` keep the base value."""

        base = base or profile_config(payload.get("profile", "integer_sir"))
        try:
            scenario = base.scenario
            if "scenario" in payload:
                scenario = ScenarioConfig.from_dict({**scenario.to_dict(), **payload["scenario"]})
            training = dict(base.training)
            for stage, changes in dict(payload.get("training", {})).items():
                if stage not in TRAIN_STAGES:
                    raise ConfigError(f"Unknown training stage {stage!r} in config")
                training[stage] = TrainConfig.from_dict({**training[stage].to_dict(), **changes})
            unet = base.unet
            if "unet" in payload:
                unet = UnetSpec.from_dict({**unet.to_dict(), **payload["unet"]})
            return cls(
                profile=payload.get("profile", base.profile),
                seed=int(payload.get("seed", base.seed)),
                scenario=scenario,
                test_examples_per_bin=int(payload.get("test_examples_per_bin", base.test_examples_per_bin)),
                test_fractional_offsets=_optional_flag(
                    payload.get("test_fractional_offsets", base.test_fractional_offsets)
                ),
                training=training,
                unet=unet,
                method_uses_sir=bool(payload.get("method_uses_sir", base.method_uses_sir)),
                workers=int(payload.get("workers", base.workers)),
            )
        except ConfigError:
            raise
        except (ScenarioError, NnError, ModelError, TypeError, ValueError) as exc:
            raise ConfigError(f"Invalid run configuration: {exc}") from exc


def _optional_flag(value: Any) -> bool | None:
    return None if value is None else bool(value)


def profile_config(profile: str) -> RunConfig:
    """Desk-scale defaults for the integer-SIR or fractional-SIR regime.

    Both profiles train on integer SIR bins. The fractional profile only moves
    the test set off the bin centres, so its models are the integer ones.
    """

    if profile not in PROFILES:
        raise ConfigError(f"Unknown profile {profile!r}; choose one of {', '.join(PROFILES)}")
    return RunConfig(
        profile=profile,  # type: ignore[arg-type]
        scenario=ScenarioConfig(examples_per_bin=15),
        test_fractional_offsets=True if profile == "fractional_sir" else None,
    )


def load_config_file(path: PathLike) -> dict[str, Any]:
    source = resolve_path(path)
    try:
        payload = json.loads(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"Unable to read config file {source}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"Config file {source} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"Config file {source} must hold a JSON object")
    return payload


def resolve_run_config(
    *,
    profile: str | None = None,
    config_path: PathLike | None = None,
    seed: int | None = None,
) -> RunConfig:
    """Apply built-in profile defaults, then the config file, then flags."""

    payload = load_config_file(config_path) if config_path is not None else {}
    chosen = profile or payload.get("profile", "integer_sir")
    config = RunConfig.from_dict(payload, base=profile_config(chosen))
    if profile is not None and config.profile != profile:
        config = config.replace(profile=profile)
    if seed is not None:
        config = config.replace(seed=seed)
    LOGGER.debug("Resolved run configuration for profile %s, seed %d", config.profile, config.seed)
    return config
