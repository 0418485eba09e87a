"""Fixed workspace layout and the lock that serialises commands on it."""

from __future__ import annotations

import contextlib
import dataclasses
import logging
import os
from pathlib import Path
from typing import Iterator

from ..utils import PathLike, resolve_path
from .exceptions import ConfigError, WorkspaceLockedError

LOGGER = logging.getLogger("sicunet.cli")

WORKSPACE_ENV_VAR = "SICU_WORKSPACE"
DEFAULT_WORKSPACE = "sicunet-workspace"
LOCK_NAME = ".sicunet.lock"


@dataclasses.dataclass(frozen=True, slots=True)
class Workspace:
    root: Path

    @property
    def datasets(self) -> Path:
        return self.root / "datasets"

    @property
    def checkpoints(self) -> Path:
        return self.root / "checkpoints"

    @property
    def reports(self) -> Path:
        return self.root / "reports"

    @property
    def run_config(self) -> Path:
        return self.root / "run_config.json"

    def dataset(self, split: str) -> Path:
        return self.datasets / f"{split}.sicu"

    def method_labels(self, split: str = "train") -> Path:
        return self.datasets / f"method_labels_{split}.json"

    def classifier(self, stage: str) -> Path:
        return self.checkpoints / f"{stage}.sicw"

    def unet(self, sps: int) -> Path:
        return self.checkpoints / f"unet_sps{sps}.sicw"

    @property
    def bank_manifest(self) -> Path:
        return self.checkpoints / "unet_bank.json"

    @property
    def pipeline_manifest(self) -> Path:
        return self.checkpoints / "pipeline.json"

    @property
    def report(self) -> Path:
        return self.reports / "report.json"

    def create(self) -> "Workspace":
        try:
            for directory in (self.datasets, self.checkpoints, self.reports):
                directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"Unable to create workspace {self.root}: {exc}") from exc
        return self

    @contextlib.contextmanager
    def locked(self) -> Iterator["Workspace"]:
        """Hold the workspace lock file for the duration of a command."""

        self.create()
        lock_path = self.root / LOCK_NAME
        try:
            handle = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as exc:
            raise WorkspaceLockedError(
                f"Workspace {self.root} is locked by another command; remove {lock_path} if no command is running"
            ) from exc
        try:
            os.write(handle, str(os.getpid()).encode("ascii"))
            os.close(handle)
            LOGGER.debug("Acquired workspace lock %s", lock_path)
            yield self
        finally:
            lock_path.unlink(missing_ok=True)


def resolve_workspace(path: PathLike | None = None) -> Workspace:
    """Use ``path``, else ``SICU_WORKSPACE``, else ``./sicunet-workspace``."""

    chosen = path or os.getenv(WORKSPACE_ENV_VAR) or DEFAULT_WORKSPACE
    return Workspace(resolve_path(chosen))
