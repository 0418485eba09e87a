"""Stage-3 ground truth: which mitigation method wins on each example."""

from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Mapping, Sequence

from ..evaluation import BerCount, MethodShare, ber
from ..models import ModelBank, ModelBankError
from ..scenario import Dataset, LabeledExample
from ..sic import SicConfig
from ..utils import PathLike, canonical_json, resolve_path, write_text_atomic
from .exceptions import PipelineConfigurationError, PipelineError
from .mitigation import SIC, SICUNET, sic_bits, unet_bits

LOGGER = logging.getLogger("sicunet.pipeline")

LABELS_VERSION = 1


@dataclasses.dataclass(frozen=True, slots=True)
class MethodOutcome:
    example_id: int
    sic: BerCount
    unet: BerCount

    @property
    def label(self) -> int:
        # SIC must be strictly better; ties go to the U-Net branch
        return SIC if self.sic.errors < self.unet.errors else SICUNET

    @property
    def tie(self) -> bool:
        return self.sic.errors == self.unet.errors


@dataclasses.dataclass(slots=True)
class MethodLabels:
    """Per-example method labels plus the per-(sps, SIR bin) winner table."""

    outcomes: dict[int, MethodOutcome]
    winners: dict[tuple[int, int], MethodShare]
    config: dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def labels(self) -> dict[int, int]:
        return {example_id: outcome.label for example_id, outcome in self.outcomes.items()}

    @property
    def tie_count(self) -> int:
        return sum(outcome.tie for outcome in self.outcomes.values())

    def label_for(self, example_id: int) -> int:
        try:
            return self.outcomes[example_id].label
        except KeyError as exc:
            raise PipelineConfigurationError(f"No method label for example {example_id}; run `sicunet labels`") from exc

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": LABELS_VERSION,
            "config": self.config,
            "tie_count": self.tie_count,
            "outcomes": [
                {
                    "example_id": o.example_id,
                    "label": o.label,
                    "sic_errors": o.sic.errors,
                    "unet_errors": o.unet.errors,
                    "bits": o.sic.bits,
                }
                for o in sorted(self.outcomes.values(), key=lambda item: item.example_id)
            ],
            "winners": [
                {"sps": sps, "sir_bin_db": sir, "sic": share.sic, "sicunet": share.sicunet}
                for (sps, sir), share in sorted(self.winners.items(), key=lambda item: (-item[0][0], item[0][1]))
            ],
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "MethodLabels":
        if payload.get("version") != LABELS_VERSION:
            raise PipelineError(f"Unsupported method-label version {payload.get('version')}")
        outcomes = {
            int(row["example_id"]): MethodOutcome(
                int(row["example_id"]),
                BerCount(int(row["sic_errors"]), int(row["bits"])),
                BerCount(int(row["unet_errors"]), int(row["bits"])),
            )
            for row in payload["outcomes"]
        }
        winners = {
            (int(row["sps"]), int(row["sir_bin_db"])): MethodShare(int(row["sic"]), int(row["sicunet"]))
            for row in payload["winners"]
        }
        return cls(outcomes=outcomes, winners=winners, config=dict(payload.get("config", {})))


def method_outcomes(
    dataset: Dataset,
    examples: Sequence[LabeledExample],
    unet_bank: ModelBank,
    sic_defaults: SicConfig,
) -> list[MethodOutcome]:
    """Run both mitigation methods with the true sps and SIR bin of each example."""

    config = dataset.config
    soi_shape = sic_defaults.soi_shape
    sps_values = [dataset.interferer_sps(ex) for ex in examples]
    unet_decisions = unet_bits(unet_bank, [ex.mixture for ex in examples], sps_values, soi_shape)
    outcomes = []
    for example, sps, unet_decided in zip(examples, sps_values, unet_decisions):
        sic_decided = sic_bits(example.mixture, sic_defaults, sps, config.sir_db_for_class(example.sir_class))
        outcomes.append(
            MethodOutcome(example.example_id, ber(example.soi_bits, sic_decided), ber(example.soi_bits, unet_decided))
        )
    return outcomes


def build_method_ground_truth(
    dataset: Dataset,
    unet_bank: ModelBank,
    sic_defaults: SicConfig,
    *,
    chunk_size: int = 64,
) -> MethodLabels:
    """Label every example with the method giving the lower BER under oracle stage inputs.

    Raises:
        PipelineConfigurationError: If the bank lacks an entry for a configured sps.
    """

    try:
        unet_bank.require_complete(dataset.config.interferer_sps_set)
    except ModelBankError as exc:
        raise PipelineConfigurationError(str(exc)) from exc

    outcomes: dict[int, MethodOutcome] = {}
    winners: dict[tuple[int, int], MethodShare] = {}
    for start in range(0, len(dataset), chunk_size):
        chunk = dataset.examples[start : start + chunk_size]
        for example, outcome in zip(chunk, method_outcomes(dataset, chunk, unet_bank, sic_defaults)):
            outcomes[example.example_id] = outcome
            key = (dataset.interferer_sps(example), dataset.sir_bin_db(example))
            won = MethodShare(1, 0) if outcome.label == SIC else MethodShare(0, 1)
            winners[key] = winners.get(key, MethodShare()) + won
        LOGGER.debug("Labelled %d/%d examples", min(start + chunk_size, len(dataset)), len(dataset))

    labels = MethodLabels(
        outcomes=outcomes,
        winners=winners,
        config={"scenario": dataset.config.to_dict(), "sic_defaults": sic_defaults.to_dict()},
    )
    LOGGER.info(
        "Built method labels for %d examples: %d SIC, %d ties resolved to SICU-Net",
        len(outcomes),
        sum(1 for o in outcomes.values() if o.label == SIC),
        labels.tie_count,
    )
    return labels


def write_method_labels(labels: MethodLabels, path: PathLike) -> Path:
    destination = resolve_path(path)
    write_text_atomic(destination, canonical_json(labels.to_dict()) + "\n")
    LOGGER.info("Wrote method labels to %s", destination)
    return destination


def read_method_labels(path: PathLike) -> MethodLabels:
    source = resolve_path(path)
    try:
        payload = json.loads(source.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise PipelineError(f"Unable to read method labels {source}: {exc}") from exc
    return MethodLabels.from_dict(payload)
