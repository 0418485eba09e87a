"""Command-line orchestration of a full study."""

from __future__ import annotations

from .commands import cmd_evaluate, cmd_generate, cmd_labels, cmd_report, cmd_train, load_split
from .config import PROFILES, TRAIN_STAGES, RunConfig, profile_config, resolve_run_config
from .exceptions import CliError, ConfigError, DataError, MissingArtifactError, WorkspaceLockedError
from .main import build_parser, exit_code_for, main
from .workspace import WORKSPACE_ENV_VAR, Workspace, resolve_workspace

__all__ = [
    "PROFILES",
    "TRAIN_STAGES",
    "WORKSPACE_ENV_VAR",
    "CliError",
    "ConfigError",
    "DataError",
    "MissingArtifactError",
    "RunConfig",
    "Workspace",
    "WorkspaceLockedError",
    "build_parser",
    "cmd_evaluate",
    "cmd_generate",
    "cmd_labels",
    "cmd_report",
    "cmd_train",
    "exit_code_for",
    "load_split",
    "main",
    "profile_config",
    "resolve_run_config",
    "resolve_workspace",
]
