"""Checkpoint files for trained modules.

Layout (little-endian)::

    "SICW" | u32 format version | u32 descriptor length | descriptor (canonical JSON)
    every tensor listed in the descriptor, in order, as f32 values
    32-byte SHA-256 of everything above

The descriptor holds the architecture (``Module.describe()``), the ordered
tensor names and shapes, and free-form training metadata.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import struct
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import numpy.typing as npt

from ..utils import CHECKSUM_SIZE, PathLike, canonical_json, digest, resolve_path, write_bytes_atomic
from .exceptions import CheckpointError, CheckpointVersionError, InvalidTensorError
from .layers import Module, build_module

LOGGER = logging.getLogger("sicunet.nn")

MAGIC = b"SICW"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<4sII")


@dataclasses.dataclass(slots=True)
class Checkpoint:
    model: Module
    metadata: dict[str, Any]
    architecture: dict[str, Any]


def encode_checkpoint(model: Module, metadata: Mapping[str, Any] | None = None) -> bytes:
    state = model.state_dict()
    descriptor = {
        "architecture": model.describe(),
        "tensors": [{"name": name, "shape": list(value.shape)} for name, value in state.items()],
        "metadata": dict(metadata or {}),
    }
    try:
        descriptor_bytes = canonical_json(descriptor).encode("utf-8")
    except ValueError as exc:
        raise CheckpointError(None, f"Metadata is not JSON serialisable: {exc}") from exc
    blobs = b"".join(np.ascontiguousarray(value, dtype="<f4").tobytes() for value in state.values())
    body = _HEADER.pack(MAGIC, CHECKPOINT_VERSION, len(descriptor_bytes)) + descriptor_bytes + blobs
    return body + digest(body)


def decode_checkpoint(data: bytes, path: Path | None = None, *, dtype: npt.DTypeLike = np.float32) -> Checkpoint:
    """Rebuild the module stored in *data*; it is returned in infer mode."""

    if len(data) < _HEADER.size + CHECKSUM_SIZE:
        raise CheckpointError(path, "File is too short to be a checkpoint")
    magic, version, descriptor_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError(path, f"Bad magic {magic!r}; not a checkpoint")
    if version != CHECKPOINT_VERSION:
        raise CheckpointVersionError(path, f"Unsupported checkpoint version {version}")
    body_end = len(data) - CHECKSUM_SIZE
    if digest(data[:body_end]) != data[body_end:]:
        raise CheckpointError(path, "Checkpoint checksum mismatch")

    start = _HEADER.size
    try:
        descriptor = json.loads(data[start : start + descriptor_len].decode("utf-8"))
        model = build_module(descriptor["architecture"])
    except (ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(path, f"Invalid descriptor: {exc}") from exc

    offset = start + descriptor_len
    state: dict[str, np.ndarray] = {}
    for entry in descriptor["tensors"]:
        count = int(np.prod(entry["shape"], dtype=np.int64))
        size = 4 * count
        if offset + size > body_end:
            raise CheckpointError(path, f"Tensor {entry['name']} is truncated")
        state[entry["name"]] = np.frombuffer(data, dtype="<f4", count=count, offset=offset).reshape(entry["shape"])
        offset += size
    if offset != body_end:
        raise CheckpointError(path, f"{body_end - offset} unexpected bytes after the last tensor")

    model.astype(dtype)
    try:
        model.load_state_dict(state)
    except InvalidTensorError as exc:
        raise CheckpointError(path, str(exc)) from exc
    model.set_mode("infer")
    return Checkpoint(model=model, metadata=descriptor.get("metadata", {}), architecture=descriptor["architecture"])


def save_checkpoint(model: Module, path: PathLike, metadata: Mapping[str, Any] | None = None) -> Path:
    destination = resolve_path(path)
    data = encode_checkpoint(model, metadata)
    try:
        write_bytes_atomic(destination, data)
    except OSError as exc:
        raise CheckpointError(destination, f"Unable to write checkpoint: {exc}") from exc
    LOGGER.info("Saved checkpoint with %d parameters to %s", model.parameter_count(), destination)
    return destination


def load_checkpoint(path: PathLike, *, dtype: npt.DTypeLike = np.float32) -> Checkpoint:
    source = resolve_path(path)
    try:
        data = source.read_bytes()
    except OSError as exc:
        raise CheckpointError(source, f"Unable to read checkpoint: {exc}") from exc
    return decode_checkpoint(data, source, dtype=dtype)
