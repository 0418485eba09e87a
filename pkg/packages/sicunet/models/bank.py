"""U-Net denoiser bank keyed by interferer samples-per-symbol."""

from __future__ import annotations

import json
import logging
import threading
from pathlib import Path
from typing import Any, Iterable, Mapping

from ..utils import PathLike, canonical_json, resolve_path, write_text_atomic
from .exceptions import ModelBankError, ModelLoadError
from .io import load_unet
from .unet import UNet
from .validators import validate_bank_complete

LOGGER = logging.getLogger("sicunet.models")

BANK_MANIFEST_VERSION = 1


class ModelBank:
    """Map from interferer sps to a U-Net, loading checkpoints on first use.

    Entries may be given as checkpoint paths or as in-memory models. Each
    path is loaded at most once, even under concurrent first access.
    """

    def __init__(
        self,
        entries: Mapping[int, PathLike | UNet],
        *,
        training: Mapping[int, Mapping[str, Any]] | None = None,
    ) -> None:
        self._paths: dict[int, Path] = {}
        self._models: dict[int, UNet] = {}
        for sps, entry in entries.items():
            if isinstance(entry, UNet):
                self._models[int(sps)] = entry.set_mode("infer")
            else:
                self._paths[int(sps)] = resolve_path(entry)
        self.training = {int(sps): dict(echo) for sps, echo in (training or {}).items()}
        self._lock = threading.Lock()

    @property
    def sps_values(self) -> tuple[int, ...]:
        return tuple(sorted(set(self._paths) | set(self._models)))

    def __contains__(self, sps: object) -> bool:
        return sps in self._paths or sps in self._models

    def require_complete(self, required: Iterable[int]) -> None:
        validate_bank_complete(self.sps_values, list(required))

    def get(self, sps: int) -> UNet:
        """Return the U-Net for ``sps``; a missing entry is an error, never a fallback."""

        model = self._models.get(sps)
        if model is not None:
            return model
        if sps not in self._paths:
            raise ModelBankError(f"U-Net bank has no model for interferer sps {sps}")
        with self._lock:
            model = self._models.get(sps)
            if model is None:
                LOGGER.info("Loading U-Net for sps=%d from %s", sps, self._paths[sps])
                model = load_unet(self._paths[sps])
                self._models[sps] = model
        return model

    def to_manifest(self, base: Path | None = None) -> dict[str, Any]:
        if not self._paths:
            raise ModelBankError("Only banks backed by checkpoint files can be described by a manifest")
        entries = {}
        for sps, path in sorted(self._paths.items()):
            location = path.relative_to(base) if base is not None and path.is_relative_to(base) else path
            entries[str(sps)] = {"checkpoint": location.as_posix(), "training": self.training.get(sps, {})}
        return {"version": BANK_MANIFEST_VERSION, "entries": entries}

    def write_manifest(self, path: PathLike) -> Path:
        destination = resolve_path(path)
        write_text_atomic(destination, canonical_json(self.to_manifest(destination.parent)) + "\n")
        LOGGER.info("Wrote U-Net bank manifest for sps %s to %s", list(self._paths), destination)
        return destination

    @classmethod
    def from_manifest(cls, path: PathLike) -> "ModelBank":
        source = resolve_path(path)
        try:
            payload = json.loads(source.read_text(encoding="utf-8"))
            if payload.get("version") != BANK_MANIFEST_VERSION:
                raise ModelLoadError(f"{source}: unsupported bank manifest version {payload.get('version')}")
            entries = {int(sps): source.parent / item["checkpoint"] for sps, item in payload["entries"].items()}
            training = {int(sps): item.get("training", {}) for sps, item in payload["entries"].items()}
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ModelLoadError(f"Unable to read bank manifest {source}: {exc}") from exc
        return cls(entries, training=training)
