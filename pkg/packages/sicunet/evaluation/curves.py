"""Per-(sps, SIR bin) BER accumulation."""

from __future__ import annotations

import dataclasses
from typing import Any, Iterator, Mapping

from .metrics import BerCount

BinKey = tuple[int, int]


@dataclasses.dataclass(slots=True)
class BerCurve:
    """Bit and error counts keyed by ``(interferer sps, SIR bin dB)``.

    Bins that never received bits are absent rather than zero.
    """

    counts: dict[BinKey, BerCount] = dataclasses.field(default_factory=dict)

    def add(self, sps: int, sir_bin_db: int, count: BerCount) -> None:
        key = (int(sps), int(sir_bin_db))
        self.counts[key] = self.counts.get(key, BerCount()) + count

    def get(self, sps: int, sir_bin_db: int) -> BerCount | None:
        count = self.counts.get((sps, sir_bin_db))
        return count if count is not None and count.bits > 0 else None

    def rate(self, sps: int, sir_bin_db: int) -> float | None:
        count = self.get(sps, sir_bin_db)
        return None if count is None else count.rate

    def sps_values(self) -> list[int]:
        return sorted({sps for sps, _ in self.counts}, reverse=True)

    def bins(self, sps: int) -> list[int]:
        return sorted(sir for key_sps, sir in self.counts if key_sps == sps and self.counts[(key_sps, sir)].bits)

    def rows(self) -> Iterator[tuple[int, int, BerCount]]:
        """Populated bins ordered by descending sps then ascending SIR."""

        for sps in self.sps_values():
            for sir in self.bins(sps):
                yield sps, sir, self.counts[(sps, sir)]

    def total(self) -> BerCount:
        result = BerCount()
        for count in self.counts.values():
            result = result + count
        return result

    def merge(self, other: "BerCurve") -> "BerCurve":
        merged = BerCurve(dict(self.counts))
        for (sps, sir), count in other.counts.items():
            merged.add(sps, sir, count)
        return merged

    def to_dict(self) -> list[dict[str, Any]]:
        return [
            {"sps": sps, "sir_bin_db": sir, "errors": count.errors, "bits": count.bits}
            for sps, sir, count in self.rows()
        ]

    @classmethod
    def from_dict(cls, rows: list[Mapping[str, Any]]) -> "BerCurve":
        curve = cls()
        for row in rows:
            curve.add(row["sps"], row["sir_bin_db"], BerCount(int(row["errors"]), int(row["bits"])))
        return curve
