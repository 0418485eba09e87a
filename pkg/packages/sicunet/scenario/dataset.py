"""Labelled examples, dataset containers and manifests."""

from __future__ import annotations

import dataclasses
from collections import Counter
from typing import Any, Callable, Iterator, Mapping, Sequence

import numpy as np
import numpy.typing as npt

from ..dsp import IqFrame
from .config import ScenarioConfig

FORMAT_VERSION = 1


@dataclasses.dataclass(frozen=True, slots=True)
class LabeledExample:
    """One mixture frame together with its ground-truth labels.

    ``soi`` and ``interferer`` hold the separate (already scaled) mixture
    components when the example was generated in-process; they are not
    persisted and are ``None`` after reading a dataset file.
    """

    mixture: IqFrame
    sps_class: int
    sir_class: int
    true_sir_db: float
    soi_bits: npt.NDArray[np.uint8]
    interferer_bits: npt.NDArray[np.uint8]
    example_id: int
    soi: IqFrame | None = dataclasses.field(default=None, compare=False, repr=False)
    interferer: IqFrame | None = dataclasses.field(default=None, compare=False, repr=False)

    def same_as(self, other: "LabeledExample") -> bool:
        """Return ``True`` when every persisted field matches bit for bit."""

        return (
            self.example_id == other.example_id
            and self.sps_class == other.sps_class
            and self.sir_class == other.sir_class
            and self.true_sir_db == other.true_sir_db
            and np.array_equal(self.soi_bits, other.soi_bits)
            and np.array_equal(self.interferer_bits, other.interferer_bits)
            and np.array_equal(self.mixture.samples, other.mixture.samples)
        )


@dataclasses.dataclass(frozen=True, slots=True)
class BinCount:
    sir_bin_db: int
    sps: int
    count: int


@dataclasses.dataclass(frozen=True, slots=True)
class DatasetManifest:
    """Describes the contents of a dataset file."""

    config: dict[str, Any]
    example_count: int
    bin_counts: tuple[BinCount, ...]
    format_version: int = FORMAT_VERSION
    payload_sha256: str = ""
    payload_bytes: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config,
            "example_count": self.example_count,
            "bin_counts": [dataclasses.asdict(item) for item in self.bin_counts],
            "format_version": self.format_version,
            "payload_sha256": self.payload_sha256,
            "payload_bytes": self.payload_bytes,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "DatasetManifest":
        return cls(
            config=dict(payload["config"]),
            example_count=int(payload["example_count"]),
            bin_counts=tuple(BinCount(**item) for item in payload["bin_counts"]),
            format_version=int(payload["format_version"]),
            payload_sha256=str(payload.get("payload_sha256", "")),
            payload_bytes=int(payload.get("payload_bytes", 0)),
        )

    def counts_consistent(self) -> bool:
        return sum(item.count for item in self.bin_counts) == self.example_count


@dataclasses.dataclass(slots=True)
class Dataset:
    """A scenario configuration and its labelled examples in ``example_id`` order."""

    config: ScenarioConfig
    examples: list[LabeledExample]

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self) -> Iterator[LabeledExample]:
        return iter(self.examples)

    def __getitem__(self, index: int) -> LabeledExample:
        return self.examples[index]

    def interferer_sps(self, example: LabeledExample) -> int:
        return self.config.sps_for_class(example.sps_class)

    def sir_bin_db(self, example: LabeledExample) -> int:
        return self.config.sir_db_for_class(example.sir_class)

    def bin_counts(self) -> tuple[BinCount, ...]:
        counter = Counter((self.sir_bin_db(ex), self.interferer_sps(ex)) for ex in self.examples)
        return tuple(
            BinCount(sir_bin_db=sir, sps=sps, count=counter[(sir, sps)])
            for sir in self.config.sir_bins_db
            for sps in self.config.interferer_sps_set
            if counter[(sir, sps)]
        )

    def manifest(self, payload_sha256: str = "", payload_bytes: int = 0) -> DatasetManifest:
        return DatasetManifest(
            config=self.config.to_dict(),
            example_count=len(self.examples),
            bin_counts=self.bin_counts(),
            payload_sha256=payload_sha256,
            payload_bytes=payload_bytes,
        )

    def subset(self, predicate: Callable[[LabeledExample], bool]) -> "Dataset":
        return Dataset(self.config, [ex for ex in self.examples if predicate(ex)])

    def mixtures(self, dtype: npt.DTypeLike = np.float32) -> npt.NDArray[np.floating]:
        """Stack every mixture as an ``N × 2 × frame_len`` array."""

        out = np.empty((len(self.examples), 2, self.config.frame_len), dtype=dtype)
        for row, example in enumerate(self.examples):
            out[row] = example.mixture.to_channels(dtype)
        return out

    def sps_labels(self) -> npt.NDArray[np.int64]:
        return np.array([ex.sps_class for ex in self.examples], dtype=np.int64)

    def sir_labels(self) -> npt.NDArray[np.int64]:
        return np.array([ex.sir_class for ex in self.examples], dtype=np.int64)

    def example_ids(self) -> Sequence[int]:
        return [ex.example_id for ex in self.examples]
