"""Path, hashing and serialisation helpers shared by the :mod:`sicunet` subpackages."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any

_LOGGER = logging.getLogger("sicunet")

PathLike = str | os.PathLike[str]

CHECKSUM_SIZE = 32


def resolve_path(path: PathLike) -> Path:
    """Resolve *path* into an absolute :class:`~pathlib.Path`."""

    resolved = Path(path).expanduser().resolve()
    _LOGGER.debug("Resolved path '%s' to '%s'", path, resolved)
    return resolved


def ensure_parent_dir(path: Path) -> None:
    """Create parent directory for *path* if it does not exist."""

    path.parent.mkdir(parents=True, exist_ok=True)


def canonical_json(payload: Any) -> str:
    """Serialise *payload* with sorted keys and no insignificant whitespace."""

    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True, allow_nan=False)


def digest(data: bytes) -> bytes:
    """Return the 32-byte SHA-256 digest of *data*."""

    return hashlib.sha256(data).digest()


def write_bytes_atomic(path: Path, data: bytes) -> Path:
    """Write *data* to *path* through a sibling temporary file."""

    ensure_parent_dir(path)
    temp_path = path.with_name(f".{path.name}.tmp")
    temp_path.write_bytes(data)
    os.replace(temp_path, path)
    return path


def write_text_atomic(path: Path, text: str) -> Path:
    return write_bytes_atomic(path, text.encode("utf-8"))
