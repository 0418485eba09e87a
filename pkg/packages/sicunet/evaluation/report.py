"""The evaluation report and its JSON form."""

from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Mapping

from ..utils import PathLike, canonical_json, resolve_path, write_text_atomic
from .curves import BerCurve, BinKey
from .exceptions import ReportFormatError, ReportWriteError
from .metrics import ConfusionMatrix, Tally

LOGGER = logging.getLogger("sicunet.evaluation")

STAGES: tuple[str, ...] = ("sps", "sir", "method")
METHODS: tuple[str, ...] = ("full", "sic", "unet")
REPORT_VERSION = 1


def _stage_rank(stage: str) -> tuple[int, str]:
    return (STAGES.index(stage) if stage in STAGES else len(STAGES), stage)


@dataclasses.dataclass(slots=True)
class MethodShare:
    sic: int = 0
    sicunet: int = 0

    def __add__(self, other: "MethodShare") -> "MethodShare":
        return MethodShare(self.sic + other.sic, self.sicunet + other.sicunet)


@dataclasses.dataclass(slots=True)
class EvalReport:
    """Stage confusion matrices, per-method BER curves and their context.

    ``accuracy_by_sir`` tallies Stage 1 and Stage 2 correctness per true SIR
    bin; ``method_share`` counts how often Stage 3 picked each method per
    ``(sps, SIR bin)``.
    """

    confusion: dict[str, ConfusionMatrix]
    curves: dict[str, BerCurve] = dataclasses.field(default_factory=lambda: {m: BerCurve() for m in METHODS})
    accuracy_by_sir: dict[str, dict[int, Tally]] = dataclasses.field(default_factory=dict)
    method_share: dict[BinKey, MethodShare] = dataclasses.field(default_factory=dict)
    config: dict[str, Any] = dataclasses.field(default_factory=dict)
    seed: int = 0
    overrides: tuple[str, ...] = ()
    example_count: int = 0

    def stage_accuracy(self, stage: str) -> Tally:
        return self.confusion[stage].tally()

    def sir_within_one_bin(self) -> Tally:
        return self.confusion["sir"].within_k(1)

    def merge(self, other: "EvalReport") -> "EvalReport":
        """Combine two partial reports; counts add, context comes from ``self``."""

        accuracy: dict[str, dict[int, Tally]] = {}
        for source in (self.accuracy_by_sir, other.accuracy_by_sir):
            for stage, per_bin in source.items():
                target = accuracy.setdefault(stage, {})
                for sir, tally in per_bin.items():
                    target[sir] = target.get(sir, Tally()) + tally
        share = dict(self.method_share)
        for key, value in other.method_share.items():
            share[key] = share.get(key, MethodShare()) + value
        return EvalReport(
            confusion={stage: self.confusion[stage] + other.confusion[stage] for stage in self.confusion},
            curves={method: self.curves[method].merge(other.curves[method]) for method in self.curves},
            accuracy_by_sir=accuracy,
            method_share=share,
            config=self.config,
            seed=self.seed,
            overrides=self.overrides,
            example_count=self.example_count + other.example_count,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": REPORT_VERSION,
            "seed": self.seed,
            "example_count": self.example_count,
            "overrides": list(self.overrides),
            "config": self.config,
            "confusion": {stage: matrix.to_dict() for stage, matrix in self.confusion.items()},
            "curves": {method: curve.to_dict() for method, curve in self.curves.items()},
            "accuracy_by_sir": {
                stage: [{"sir_bin_db": sir, "correct": t.correct, "total": t.total} for sir, t in sorted(per_bin.items())]
                for stage, per_bin in self.accuracy_by_sir.items()
            },
            "method_share": [
                {"sps": sps, "sir_bin_db": sir, "sic": share.sic, "sicunet": share.sicunet}
                for (sps, sir), share in sorted(self.method_share.items(), key=lambda item: (-item[0][0], item[0][1]))
            ],
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "EvalReport":
        if payload.get("version") != REPORT_VERSION:
            raise ReportFormatError(f"Unsupported report version {payload.get('version')}")
        try:
            # JSON keys come back sorted; restore pipeline order for stable artifacts
            stages = sorted(payload["confusion"], key=_stage_rank)
            return cls(
                confusion={stage: ConfusionMatrix.from_dict(payload["confusion"][stage]) for stage in stages},
                curves={method: BerCurve.from_dict(rows) for method, rows in payload["curves"].items()},
                accuracy_by_sir={
                    stage: {int(row["sir_bin_db"]): Tally(int(row["correct"]), int(row["total"])) for row in rows}
                    for stage, rows in sorted(payload["accuracy_by_sir"].items(), key=lambda item: _stage_rank(item[0]))
                },
                method_share={
                    (int(row["sps"]), int(row["sir_bin_db"])): MethodShare(int(row["sic"]), int(row["sicunet"]))
                    for row in payload["method_share"]
                },
                config=dict(payload.get("config", {})),
                seed=int(payload.get("seed", 0)),
                overrides=tuple(payload.get("overrides", ())),
                example_count=int(payload.get("example_count", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ReportFormatError(f"Malformed report: {exc}") from exc


def write_report(report: EvalReport, path: PathLike) -> Path:
    destination = resolve_path(path)
    try:
        write_text_atomic(destination, canonical_json(report.to_dict()) + "\n")
    except OSError as exc:
        raise ReportWriteError(destination, f"Unable to write report: {exc}") from exc
    LOGGER.info("Wrote evaluation report for %d examples to %s", report.example_count, destination)
    return destination


def read_report(path: PathLike) -> EvalReport:
    source = resolve_path(path)
    try:
        payload = json.loads(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ReportFormatError(f"Unable to read report {source}: {exc}") from exc
    except ValueError as exc:
        raise ReportFormatError(f"Report {source} is not valid JSON: {exc}") from exc
    return EvalReport.from_dict(payload)
