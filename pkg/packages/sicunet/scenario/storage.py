"""Binary persistence of datasets.

Layout (little-endian)::

    "SICU" | u32 format version | u32 manifest length | manifest (canonical JSON)
    per example:
        u64 example_id | u8 sps_class | u8 sir_class | f64 true_sir_db
        u32 SOI bit count | packed SOI bits
        u32 interferer bit count | packed interferer bits
        frame_len x (f32 I, f32 Q)
    32-byte SHA-256 of everything above

The trailing checksum is verified before any payload field is parsed.
The manifest records the payload length, so a short file is reported as
truncated rather than corrupt.
"""

from __future__ import annotations

import io
import json
import logging
import struct
from pathlib import Path

import numpy as np

from ..dsp import IqFrame
from ..utils import CHECKSUM_SIZE, PathLike, canonical_json, digest, resolve_path, write_bytes_atomic
from .config import ScenarioConfig
from .dataset import FORMAT_VERSION, Dataset, DatasetManifest, LabeledExample
from .exceptions import (
    DatasetChecksumError,
    DatasetFormatError,
    DatasetIOError,
    DatasetTruncatedError,
    DatasetVersionError,
)

LOGGER = logging.getLogger("sicunet.scenario")

MAGIC = b"SICU"
_HEADER = struct.Struct("<4sII")
_LABELS = struct.Struct("<QBBd")
_COUNT = struct.Struct("<I")


def _encode_example(example: LabeledExample, frame_len: int) -> bytes:
    if len(example.mixture) != frame_len:
        raise DatasetFormatError(None, f"Example {example.example_id} has {len(example.mixture)} samples, expected {frame_len}")
    parts = [_LABELS.pack(example.example_id, example.sps_class, example.sir_class, example.true_sir_db)]
    for bits in (example.soi_bits, example.interferer_bits):
        parts.append(_COUNT.pack(bits.size))
        parts.append(np.packbits(bits).tobytes())
    interleaved = np.empty(2 * frame_len, dtype="<f4")
    interleaved[0::2] = example.mixture.i
    interleaved[1::2] = example.mixture.q
    parts.append(interleaved.tobytes())
    return b"".join(parts)


def encode_dataset(dataset: Dataset) -> bytes:
    """Serialise *dataset* into the on-disk byte layout."""

    frame_len = dataset.config.frame_len
    payload = b"".join(_encode_example(ex, frame_len) for ex in sorted(dataset.examples, key=lambda e: e.example_id))
    manifest = dataset.manifest(payload_sha256=digest(payload).hex(), payload_bytes=len(payload))
    manifest_bytes = canonical_json(manifest.to_dict()).encode("utf-8")

    buffer = io.BytesIO()
    buffer.write(_HEADER.pack(MAGIC, FORMAT_VERSION, len(manifest_bytes)))
    buffer.write(manifest_bytes)
    buffer.write(payload)
    body = buffer.getvalue()
    return body + digest(body)


def write_dataset(dataset: Dataset, path: PathLike) -> Path:
    """Write *dataset* to *path* and return the resolved destination.

    Raises:
        DatasetIOError: If the destination cannot be written.
    """

    destination = resolve_path(path)
    data = encode_dataset(dataset)
    try:
        write_bytes_atomic(destination, data)
    except OSError as exc:
        raise DatasetIOError(f"Unable to write dataset to {destination}: {exc}") from exc
    LOGGER.info("Wrote %d examples (%d bytes) to %s", len(dataset), len(data), destination)
    return destination


class _Cursor:
    def __init__(self, data: bytes, end: int, path: Path | None) -> None:
        self.data = data
        self.end = end
        self.pos = 0
        self.path = path

    def take(self, size: int) -> bytes:
        if self.pos + size > self.end:
            raise DatasetTruncatedError(self.path, f"Unexpected end of data at byte {self.pos} (needed {size})")
        chunk = self.data[self.pos : self.pos + size]
        self.pos += size
        return chunk

    def unpack(self, layout: struct.Struct) -> tuple:
        return layout.unpack(self.take(layout.size))


def _declared_payload_bytes(raw: bytes) -> int | None:
    try:
        return int(json.loads(raw.decode("utf-8"))["payload_bytes"])
    except (ValueError, KeyError, TypeError):
        return None


def _decode_bits(cursor: _Cursor) -> np.ndarray:
    (count,) = cursor.unpack(_COUNT)
    packed = np.frombuffer(cursor.take((count + 7) // 8), dtype=np.uint8)
    return np.unpackbits(packed, count=count).astype(np.uint8)


def decode_dataset(data: bytes, path: Path | None = None) -> Dataset:
    """Decode bytes produced by :func:`encode_dataset`.

    Raises:
        DatasetVersionError: The format version is not supported.
        DatasetTruncatedError: The data ends before its declared contents.
        DatasetChecksumError: The stored checksum does not match.
        DatasetFormatError: Any other structural problem.
    """

    if len(data) < _HEADER.size:
        raise DatasetTruncatedError(path, "File is shorter than the dataset header")
    magic, version, manifest_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DatasetFormatError(path, f"Bad magic {magic!r}; not a dataset file")
    if version != FORMAT_VERSION:
        raise DatasetVersionError(path, f"Unsupported dataset format version {version} (supported: {FORMAT_VERSION})")

    body_start = _HEADER.size + manifest_len
    if len(data) < body_start + CHECKSUM_SIZE:
        raise DatasetTruncatedError(path, "File ends inside the manifest block")
    body_end = len(data) - CHECKSUM_SIZE
    declared = _declared_payload_bytes(data[_HEADER.size : body_start])
    if declared is not None and body_end - body_start < declared:
        raise DatasetTruncatedError(path, f"Payload holds {body_end - body_start} of {declared} declared bytes")
    if digest(data[:body_end]) != data[body_end:]:
        raise DatasetChecksumError(path, "Content checksum mismatch")

    cursor = _Cursor(data, body_end, path)
    cursor.pos = _HEADER.size
    try:
        manifest = DatasetManifest.from_dict(json.loads(cursor.take(manifest_len).decode("utf-8")))
        config = ScenarioConfig.from_dict(manifest.config)
    except DatasetTruncatedError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise DatasetFormatError(path, f"Invalid manifest: {exc}") from exc

    payload_start = cursor.pos
    frame_bytes = 2 * config.frame_len * 4
    examples: list[LabeledExample] = []
    for _ in range(manifest.example_count):
        example_id, sps_class, sir_class, true_sir = cursor.unpack(_LABELS)
        soi_bits = _decode_bits(cursor)
        interferer_bits = _decode_bits(cursor)
        interleaved = np.frombuffer(cursor.take(frame_bytes), dtype="<f4").astype(np.float64)
        try:
            mixture = IqFrame(interleaved[0::2] + 1j * interleaved[1::2], sps=config.soi_sps)
        except ValueError as exc:
            raise DatasetFormatError(path, f"Example {example_id}: {exc}") from exc
        examples.append(
            LabeledExample(
                mixture=mixture,
                sps_class=sps_class,
                sir_class=sir_class,
                true_sir_db=true_sir,
                soi_bits=soi_bits,
                interferer_bits=interferer_bits,
                example_id=example_id,
            )
        )

    if cursor.pos != cursor.end:
        raise DatasetFormatError(path, f"{cursor.end - cursor.pos} unexpected bytes after the last example")
    if manifest.payload_sha256 and digest(data[payload_start : cursor.end]).hex() != manifest.payload_sha256:
        raise DatasetChecksumError(path, "Payload checksum does not match the manifest")
    if not manifest.counts_consistent():
        raise DatasetFormatError(path, "Manifest bin counts do not add up to the example count")
    return Dataset(config=config, examples=examples)


def read_dataset(path: PathLike) -> Dataset:
    """Read a dataset written by :func:`write_dataset`."""

    source = resolve_path(path)
    try:
        data = source.read_bytes()
    except OSError as exc:
        raise DatasetIOError(f"Unable to read dataset {source}: {exc}") from exc
    dataset = decode_dataset(data, source)
    LOGGER.info("Read %d examples from %s", len(dataset), source)
    return dataset


def read_manifest(path: PathLike) -> DatasetManifest:
    """Read only the manifest block of a dataset file."""

    source = resolve_path(path)
    try:
        with source.open("rb") as handle:
            header = handle.read(_HEADER.size)
            if len(header) < _HEADER.size:
                raise DatasetTruncatedError(source, "File is shorter than the dataset header")
            magic, version, manifest_len = _HEADER.unpack(header)
            if magic != MAGIC:
                raise DatasetFormatError(source, f"Bad magic {magic!r}; not a dataset file")
            if version != FORMAT_VERSION:
                raise DatasetVersionError(source, f"Unsupported dataset format version {version}")
            raw = handle.read(manifest_len)
    except OSError as exc:
        raise DatasetIOError(f"Unable to read dataset {source}: {exc}") from exc
    if len(raw) < manifest_len:
        raise DatasetTruncatedError(source, "Manifest block is truncated")
    return DatasetManifest.from_dict(json.loads(raw.decode("utf-8")))
