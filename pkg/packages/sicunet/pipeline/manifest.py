"""Pipeline manifest: where a recommender's checkpoints live and how it is configured."""

from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Mapping

from ..models import ModelBank, ModelError, load_classifier
from ..scenario import ScenarioConfig
from ..sic import SicConfig
from ..utils import PathLike, canonical_json, resolve_path, write_text_atomic
from .exceptions import PipelineConfigurationError
from .recommender import RecommenderPipeline

LOGGER = logging.getLogger("sicunet.pipeline")

PIPELINE_MANIFEST_VERSION = 1


@dataclasses.dataclass(frozen=True, slots=True)
class PipelineManifest:
    """Checkpoint locations relative to the manifest directory, plus configuration."""

    scenario: ScenarioConfig
    sic_defaults: SicConfig
    bank_manifest: str
    sps_checkpoint: str | None = None
    sir_checkpoint: str | None = None
    method_checkpoint: str | None = None
    method_uses_sir: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": PIPELINE_MANIFEST_VERSION,
            "scenario": self.scenario.to_dict(),
            "sic_defaults": self.sic_defaults.to_dict(),
            "checkpoints": {
                "sps": self.sps_checkpoint,
                "sir": self.sir_checkpoint,
                "method": self.method_checkpoint,
                "unet_bank": self.bank_manifest,
            },
            "method_uses_sir": self.method_uses_sir,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "PipelineManifest":
        if payload.get("version") != PIPELINE_MANIFEST_VERSION:
            raise PipelineConfigurationError(f"Unsupported pipeline manifest version {payload.get('version')}")
        checkpoints = payload["checkpoints"]
        return cls(
            scenario=ScenarioConfig.from_dict(payload["scenario"]),
            sic_defaults=SicConfig.from_dict(payload["sic_defaults"]),
            bank_manifest=str(checkpoints["unet_bank"]),
            sps_checkpoint=checkpoints.get("sps"),
            sir_checkpoint=checkpoints.get("sir"),
            method_checkpoint=checkpoints.get("method"),
            method_uses_sir=bool(payload.get("method_uses_sir", False)),
        )


def write_pipeline_manifest(manifest: PipelineManifest, path: PathLike) -> Path:
    destination = resolve_path(path)
    write_text_atomic(destination, canonical_json(manifest.to_dict()) + "\n")
    LOGGER.info("Wrote pipeline manifest to %s", destination)
    return destination


def read_pipeline_manifest(path: PathLike) -> PipelineManifest:
    source = resolve_path(path)
    try:
        payload = json.loads(source.read_text(encoding="utf-8"))
        return PipelineManifest.from_dict(payload)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise PipelineConfigurationError(f"Unable to read pipeline manifest {source}: {exc}") from exc


def load_pipeline(path: PathLike) -> RecommenderPipeline:
    """Build a :class:`RecommenderPipeline` from a manifest file.

    Classifier entries left empty load as ``None``; those stages must then be
    overridden on every call.

    Raises:
        PipelineConfigurationError: If the manifest or a checkpoint cannot be loaded.
    """

    source = resolve_path(path)
    manifest = read_pipeline_manifest(source)
    base = source.parent

    def classifier(location: str | None):
        return None if location is None else load_classifier(base / location)

    try:
        sps_model = classifier(manifest.sps_checkpoint)
        sir_model = classifier(manifest.sir_checkpoint)
        method_model = classifier(manifest.method_checkpoint)
        bank = ModelBank.from_manifest(base / manifest.bank_manifest)
    except ModelError as exc:
        raise PipelineConfigurationError(f"Unable to load pipeline from {source}: {exc}") from exc
    return RecommenderPipeline(
        scenario=manifest.scenario,
        sps_model=sps_model,
        sir_model=sir_model,
        method_model=method_model,
        unet_bank=bank,
        sic_defaults=manifest.sic_defaults,
        method_uses_sir=manifest.method_uses_sir,
    )
