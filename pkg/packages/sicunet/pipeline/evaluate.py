"""Evaluate the recommender against both standalone mitigation methods."""

from __future__ import annotations

import logging
from typing import AbstractSet, Sequence

from ..evaluation import STAGES, BerCurve, EvalReport, MethodShare, Tally, ber, confusion
from ..scenario import Dataset, LabeledExample, nearest_sir_bin
from .exceptions import PipelineConfigurationError
from .labels import MethodLabels, method_outcomes
from .mitigation import METHOD_NAMES, SIC, sic_bits, unet_bits
from .recommender import RecommenderPipeline, StageOverrides, stage_traces

LOGGER = logging.getLogger("sicunet.pipeline")


def oracle_overrides(
    dataset: Dataset,
    examples: Sequence[LabeledExample],
    oracle_stages: AbstractSet[str],
    method_labels: MethodLabels | None,
) -> list[StageOverrides]:
    """Ground-truth values for the stages named in ``oracle_stages``."""

    return [
        StageOverrides(
            sps=dataset.interferer_sps(ex) if "sps" in oracle_stages else None,
            sir_db=dataset.sir_bin_db(ex) if "sir" in oracle_stages else None,
            method=method_labels.label_for(ex.example_id) if "method" in oracle_stages and method_labels else None,
        )
        for ex in examples
    ]


def _validate_request(oracle_stages: AbstractSet[str], method_labels: MethodLabels | None, chunk_size: int) -> None:
    unknown = set(oracle_stages) - set(STAGES)
    if unknown:
        raise PipelineConfigurationError(f"Unknown oracle stage(s): {', '.join(sorted(unknown))}")
    if "method" in oracle_stages and method_labels is None:
        raise PipelineConfigurationError("An oracle method stage needs method labels; run `sicunet labels`")
    if chunk_size < 1:
        raise PipelineConfigurationError("chunk_size must be positive")


def _evaluate_chunk(
    pipeline: RecommenderPipeline,
    dataset: Dataset,
    examples: Sequence[LabeledExample],
    oracle_stages: AbstractSet[str],
    method_labels: MethodLabels | None,
) -> EvalReport:
    config = dataset.config
    mixtures = [ex.mixture for ex in examples]
    traces = stage_traces(pipeline, mixtures, oracle_overrides(dataset, examples, oracle_stages, method_labels))

    soi_shape = pipeline.sic_defaults.soi_shape
    unet_only = unet_bits(pipeline.unet_bank, mixtures, [t.predicted_sps for t in traces], soi_shape)
    if method_labels is not None:
        method_truth = [method_labels.label_for(ex.example_id) for ex in examples]
    else:
        method_truth = [o.label for o in method_outcomes(dataset, examples, pipeline.unet_bank, pipeline.sic_defaults)]

    curves = {"full": BerCurve(), "sic": BerCurve(), "unet": BerCurve()}
    accuracy: dict[str, dict[int, Tally]] = {"sps": {}, "sir": {}}
    share: dict[tuple[int, int], MethodShare] = {}
    sps_pred, sir_pred, method_pred = [], [], []
    for example, trace, unet_decided in zip(examples, traces, unet_only):
        sps = dataset.interferer_sps(example)
        sir_bin = dataset.sir_bin_db(example)
        sic_decided = sic_bits(example.mixture, pipeline.sic_defaults, trace.predicted_sps, trace.predicted_sir_db)
        full_decided = sic_decided if trace.chosen_method == SIC else unet_decided
        for method, decided in (("full", full_decided), ("sic", sic_decided), ("unet", unet_decided)):
            curves[method].add(sps, sir_bin, ber(example.soi_bits, decided))

        sps_class = config.sps_class(trace.predicted_sps)
        sir_class = nearest_sir_bin(trace.predicted_sir_db, config.sir_bins_db)
        sps_pred.append(sps_class)
        sir_pred.append(sir_class)
        method_pred.append(trace.chosen_method)
        for stage, hit in (("sps", sps_class == example.sps_class), ("sir", sir_class == example.sir_class)):
            accuracy[stage][sir_bin] = accuracy[stage].get(sir_bin, Tally()) + Tally(int(hit), 1)
        chosen = MethodShare(1, 0) if trace.chosen_method == SIC else MethodShare(0, 1)
        share[(sps, sir_bin)] = share.get((sps, sir_bin), MethodShare()) + chosen

    matrices = {
        "sps": confusion(
            sps_pred, [ex.sps_class for ex in examples], config.num_sps_classes, class_labels=config.interferer_sps_set
        ),
        "sir": confusion(
            sir_pred, [ex.sir_class for ex in examples], config.num_sir_classes, class_labels=config.sir_bins_db
        ),
        "method": confusion(method_pred, method_truth, 2, class_labels=METHOD_NAMES),
    }
    return EvalReport(
        confusion=matrices,
        curves=curves,
        accuracy_by_sir=accuracy,
        method_share=share,
        example_count=len(examples),
    )


def evaluate_pipeline(
    pipeline: RecommenderPipeline,
    dataset: Dataset,
    *,
    oracle_stages: AbstractSet[str] = frozenset(),
    method_labels: MethodLabels | None = None,
    chunk_size: int = 64,
) -> EvalReport:
    """Run the full pipeline, SIC-only and U-Net-only over ``dataset``.

    SIC-only and U-Net-only use the predicted sps and SIR, so the full
    pipeline's bits always equal those of the method Stage 3 chose. BER is
    keyed by the true interferer sps and true SIR bin. Stage 3 is scored
    against ``method_labels`` when given, otherwise against labels built on
    the fly with oracle stage inputs.

    Stages named in ``oracle_stages`` take their ground truth instead of a
    prediction; an oracle method stage requires ``method_labels``.

    Raises:
        PipelineConfigurationError: On an invalid request or missing model.
    """

    _validate_request(oracle_stages, method_labels, chunk_size)
    if len(dataset) == 0:
        raise PipelineConfigurationError("Cannot evaluate an empty dataset")
    config = dataset.config
    if config.frame_len != pipeline.scenario.frame_len or config.interferer_sps_set != pipeline.scenario.interferer_sps_set:
        raise PipelineConfigurationError("Dataset and pipeline scenarios disagree on frame length or sps set")

    overrides = tuple(stage for stage in STAGES if stage in oracle_stages)
    if overrides:
        LOGGER.warning("Evaluating with oracle stage(s): %s", ", ".join(overrides))

    report: EvalReport | None = None
    for start in range(0, len(dataset), chunk_size):
        chunk = dataset.examples[start : start + chunk_size]
        partial = _evaluate_chunk(pipeline, dataset, chunk, oracle_stages, method_labels)
        report = partial if report is None else report.merge(partial)
        LOGGER.debug("Evaluated %d/%d examples", report.example_count, len(dataset))

    assert report is not None
    report.config = {
        "scenario": config.to_dict(),
        "sic_defaults": pipeline.sic_defaults.to_dict(),
        "method_uses_sir": pipeline.method_uses_sir,
    }
    report.seed = config.seed
    report.overrides = overrides
    LOGGER.info(
        "Evaluated %d examples: sps %.4f, sir %.4f, method %.4f",
        report.example_count,
        report.stage_accuracy("sps").accuracy,
        report.stage_accuracy("sir").accuracy,
        report.stage_accuracy("method").accuracy,
    )
    return report
