"""Labelled mixture datasets for the :mod:`sicunet` toolkit."""

from __future__ import annotations

from .config import (
    DEFAULT_FRAME_LEN,
    DEFAULT_INTERFERER_SPS,
    DEFAULT_SIR_BINS_DB,
    DEFAULT_SOI_SPS,
    ScenarioConfig,
    nearest_sir_bin,
)
from .dataset import FORMAT_VERSION, BinCount, Dataset, DatasetManifest, LabeledExample
from .exceptions import (
    DatasetChecksumError,
    DatasetFormatError,
    DatasetIOError,
    DatasetTruncatedError,
    DatasetVersionError,
    InvalidScenarioError,
    ScenarioError,
)
from .generator import example_cell, example_rng, example_sir_db, generate_dataset, generate_example, regenerate_example
from .storage import decode_dataset, encode_dataset, read_dataset, read_manifest, write_dataset

__all__ = [
    "DEFAULT_FRAME_LEN",
    "DEFAULT_INTERFERER_SPS",
    "DEFAULT_SIR_BINS_DB",
    "DEFAULT_SOI_SPS",
    "FORMAT_VERSION",
    "ScenarioConfig",
    "LabeledExample",
    "Dataset",
    "DatasetManifest",
    "BinCount",
    "nearest_sir_bin",
    "example_rng",
    "example_sir_db",
    "example_cell",
    "generate_example",
    "generate_dataset",
    "regenerate_example",
    "encode_dataset",
    "decode_dataset",
    "write_dataset",
    "read_dataset",
    "read_manifest",
    "ScenarioError",
    "InvalidScenarioError",
    "DatasetFormatError",
    "DatasetChecksumError",
    "DatasetVersionError",
    "DatasetTruncatedError",
    "DatasetIOError",
]
