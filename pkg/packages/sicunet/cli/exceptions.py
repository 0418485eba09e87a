"""Custom exceptions raised by :mod:`sicunet.cli`."""

from __future__ import annotations

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_MODEL = 4
EXIT_LOCKED = 5


class CliError(Exception):
    """Base exception for command failures; carries the process exit code."""

    exit_code = EXIT_FAILURE


class ConfigError(CliError, ValueError):
    """Raised when the run configuration, a config file or a flag is invalid."""

    exit_code = EXIT_CONFIG


class DataError(CliError):
    """Raised when a dataset or label file is missing or unreadable."""

    exit_code = EXIT_DATA


class MissingArtifactError(CliError):
    """Raised when a model checkpoint or manifest a command needs does not exist."""

    exit_code = EXIT_MODEL


class WorkspaceLockedError(CliError):
    """Raised when another command holds the workspace lock."""

    exit_code = EXIT_LOCKED
