from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from sicunet.evaluation import BerCount, ber
from sicunet.models import CnnClassifier, ModelBank, UnetSpec, build_unet, save_model
from sicunet.pipeline import (
    SIC,
    SICUNET,
    MethodLabels,
    MethodOutcome,
    PipelineConfigurationError,
    PipelineError,
    PipelineManifest,
    RecommenderPipeline,
    StageOverrides,
    build_method_ground_truth,
    evaluate_pipeline,
    load_pipeline,
    method_in_channels,
    method_side_values,
    oracle_overrides,
    read_method_labels,
    read_pipeline_manifest,
    run,
    run_batch,
    sic_bits,
    unet_bits,
    write_method_labels,
    write_pipeline_manifest,
)
from sicunet.scenario import Dataset, generate_dataset


def test_stage_overrides_name_their_stages() -> None:
    assert StageOverrides().names() == ()
    assert StageOverrides(sps=16, method=SIC).names() == ("sps", "method")
    assert StageOverrides(sir_db=-3.0).names() == ("sir",)


def test_method_side_channels() -> None:
    assert method_side_values(16) == [0.5]
    assert method_side_values(4, -10.0) == [0.125, -1.0]
    assert method_in_channels(False) == 3
    assert method_in_channels(True) == 4


def test_run_produces_bits_from_the_chosen_method(
    untrained_pipeline: RecommenderPipeline, small_dataset: Dataset
) -> None:
    soi_shape = untrained_pipeline.sic_defaults.soi_shape
    for example in small_dataset.examples[:6]:
        output = untrained_pipeline.run(example.mixture)
        trace = output.trace

        assert output.soi_bits.size == example.soi_bits.size
        assert trace.predicted_sps in small_dataset.config.interferer_sps_set
        assert trace.predicted_sir_db in small_dataset.config.sir_bins_db
        assert trace.chosen_method in (SIC, SICUNET)
        assert trace.sps_posteriors is not None and trace.sps_posteriors.shape == (3,)
        assert trace.method_posteriors is not None
        np.testing.assert_allclose(trace.method_posteriors.sum(), 1.0)
        assert trace.overridden == ()

        if trace.chosen_method == SIC:
            expected = sic_bits(example.mixture, untrained_pipeline.sic_defaults, trace.predicted_sps, trace.predicted_sir_db)
        else:
            expected = unet_bits(untrained_pipeline.unet_bank, [example.mixture], [trace.predicted_sps], soi_shape)[0]
        np.testing.assert_array_equal(output.soi_bits, expected)


def test_overrides_replace_stage_predictions(untrained_pipeline: RecommenderPipeline, small_dataset: Dataset) -> None:
    example = small_dataset[0]

    forced_sic = run(untrained_pipeline, example.mixture, StageOverrides(sps=32, sir_db=-10.0, method=SIC))
    forced_unet = run(untrained_pipeline, example.mixture, StageOverrides(sps=4, method=SICUNET))

    assert forced_sic.trace.predicted_sps == 32
    assert forced_sic.trace.predicted_sir_db == -10.0
    assert forced_sic.trace.method_name == "SIC"
    assert forced_sic.trace.overridden == ("sps", "sir", "method")
    np.testing.assert_array_equal(
        forced_sic.soi_bits, sic_bits(example.mixture, untrained_pipeline.sic_defaults, 32, -10.0)
    )
    assert forced_unet.trace.method_name == "SICU-Net"
    np.testing.assert_array_equal(
        forced_unet.soi_bits,
        unet_bits(untrained_pipeline.unet_bank, [example.mixture], [4], untrained_pipeline.sic_defaults.soi_shape)[0],
    )


def test_invalid_overrides_are_rejected(untrained_pipeline: RecommenderPipeline, small_dataset: Dataset) -> None:
    mixture = small_dataset[0].mixture
    with pytest.raises(PipelineConfigurationError):
        run(untrained_pipeline, mixture, StageOverrides(sps=8))
    with pytest.raises(PipelineConfigurationError):
        run(untrained_pipeline, mixture, StageOverrides(method=2))
    with pytest.raises(PipelineConfigurationError):
        run_batch(untrained_pipeline, [mixture, mixture], [StageOverrides()])


def test_batch_matches_single_runs(untrained_pipeline: RecommenderPipeline, small_dataset: Dataset) -> None:
    mixtures = [example.mixture for example in small_dataset.examples[:5]]
    overrides = [StageOverrides(method=SIC), StageOverrides(method=SICUNET)] * 2 + [StageOverrides(method=SIC)]

    batch = run_batch(untrained_pipeline, mixtures, overrides)

    for mixture, override, output in zip(mixtures, overrides, batch):
        single = run(untrained_pipeline, mixture, override)
        assert single.trace.chosen_method == output.trace.chosen_method
        np.testing.assert_array_equal(single.soi_bits, output.soi_bits)


def test_missing_models_must_be_overridden(untrained_pipeline: RecommenderPipeline, small_dataset: Dataset) -> None:
    pipeline = dataclasses.replace(untrained_pipeline, sps_model=None, method_model=None)
    mixture = small_dataset[0].mixture

    output = run(pipeline, mixture, StageOverrides(sps=16, method=SIC))
    assert output.trace.sps_posteriors is None
    assert output.trace.sir_posteriors is not None

    with pytest.raises(PipelineConfigurationError):
        run(pipeline, mixture)


def test_pipeline_rejects_mismatched_models(
    untrained_pipeline: RecommenderPipeline,
    classifier_factory: Callable[..., CnnClassifier],
    tiny_unet_spec: UnetSpec,
) -> None:
    with pytest.raises(PipelineConfigurationError):
        dataclasses.replace(untrained_pipeline, sps_model=classifier_factory(21))
    with pytest.raises(PipelineConfigurationError):
        dataclasses.replace(untrained_pipeline, method_model=classifier_factory(2))
    with pytest.raises(PipelineConfigurationError, match="train unet"):
        dataclasses.replace(untrained_pipeline, unet_bank=ModelBank({16: build_unet(tiny_unet_spec)}))


def test_ties_go_to_the_unet_branch() -> None:
    assert MethodOutcome(0, BerCount(3, 10), BerCount(3, 10)).label == SICUNET
    assert MethodOutcome(0, BerCount(3, 10), BerCount(3, 10)).tie
    assert MethodOutcome(1, BerCount(2, 10), BerCount(3, 10)).label == SIC
    assert MethodOutcome(2, BerCount(4, 10), BerCount(3, 10)).label == SICUNET


def test_method_ground_truth(untrained_pipeline: RecommenderPipeline, small_dataset: Dataset, tmp_path: Path) -> None:
    labels = build_method_ground_truth(small_dataset, untrained_pipeline.unet_bank, untrained_pipeline.sic_defaults)

    assert sorted(labels.labels) == list(range(18))
    assert sum(share.sic + share.sicunet for share in labels.winners.values()) == 18

    example = small_dataset[7]
    outcome = labels.outcomes[7]
    sps = small_dataset.interferer_sps(example)
    expected_sic = sic_bits(example.mixture, untrained_pipeline.sic_defaults, sps, small_dataset.sir_bin_db(example))
    assert outcome.sic == ber(example.soi_bits, expected_sic)

    chunked = build_method_ground_truth(
        small_dataset, untrained_pipeline.unet_bank, untrained_pipeline.sic_defaults, chunk_size=5
    )
    assert chunked.labels == labels.labels

    path = write_method_labels(labels, tmp_path / "labels" / "method.json")
    restored = read_method_labels(path)
    assert restored.to_dict() == labels.to_dict()
    assert MethodLabels.from_dict(labels.to_dict()).labels == labels.labels

    with pytest.raises(PipelineConfigurationError):
        labels.label_for(99)
    with pytest.raises(PipelineError):
        MethodLabels.from_dict({**labels.to_dict(), "version": 7})


def test_oracle_overrides_take_ground_truth(untrained_pipeline: RecommenderPipeline, small_dataset: Dataset) -> None:
    examples = small_dataset.examples[:4]

    overrides = oracle_overrides(small_dataset, examples, {"sps", "sir"}, None)

    for example, override in zip(examples, overrides):
        assert override.sps == small_dataset.interferer_sps(example)
        assert override.sir_db == small_dataset.sir_bin_db(example)
        assert override.method is None


def test_evaluation_report_counts(untrained_pipeline: RecommenderPipeline, small_dataset: Dataset) -> None:
    report = evaluate_pipeline(untrained_pipeline, small_dataset)

    assert report.example_count == 18
    assert report.seed == small_dataset.config.seed
    assert report.overrides == ()
    for stage in ("sps", "sir", "method"):
        assert report.stage_accuracy(stage).total == 18
    bits_per_example = small_dataset[0].soi_bits.size
    for method in ("full", "sic", "unet"):
        assert report.curves[method].total().bits == 18 * bits_per_example
    assert len(report.curves["full"].to_dict()) == 9
    assert sum(share.sic + share.sicunet for share in report.method_share.values()) == 18
    assert report.config["method_uses_sir"] is False


def test_chunked_evaluation_merges_exactly(untrained_pipeline: RecommenderPipeline, small_dataset: Dataset) -> None:
    labels = build_method_ground_truth(small_dataset, untrained_pipeline.unet_bank, untrained_pipeline.sic_defaults)
    oracle = frozenset({"sps", "sir", "method"})

    whole = evaluate_pipeline(untrained_pipeline, small_dataset, oracle_stages=oracle, method_labels=labels)
    chunked = evaluate_pipeline(
        untrained_pipeline, small_dataset, oracle_stages=oracle, method_labels=labels, chunk_size=4
    )

    assert chunked.to_dict() == whole.to_dict()
    assert whole.overrides == ("sps", "sir", "method")
    assert whole.stage_accuracy("sps").accuracy == 1.0
    assert whole.stage_accuracy("sir").accuracy == 1.0
    assert whole.stage_accuracy("method").accuracy == 1.0


def test_oracle_pipeline_takes_the_per_example_minimum(
    untrained_pipeline: RecommenderPipeline, small_dataset: Dataset
) -> None:
    labels = build_method_ground_truth(small_dataset, untrained_pipeline.unet_bank, untrained_pipeline.sic_defaults)

    report = evaluate_pipeline(
        untrained_pipeline, small_dataset, oracle_stages={"sps", "sir", "method"}, method_labels=labels
    )

    expected: dict[tuple[int, int], int] = {}
    for example in small_dataset:
        outcome = labels.outcomes[example.example_id]
        key = (small_dataset.interferer_sps(example), small_dataset.sir_bin_db(example))
        expected[key] = expected.get(key, 0) + min(outcome.sic.errors, outcome.unet.errors)
    assert {(sps, sir): count.errors for sps, sir, count in report.curves["full"].rows()} == expected


def test_oracle_sps_is_always_right(untrained_pipeline: RecommenderPipeline, small_dataset: Dataset) -> None:
    report = evaluate_pipeline(untrained_pipeline, small_dataset, oracle_stages={"sps"})

    assert report.stage_accuracy("sps").accuracy == 1.0
    assert all(tally.accuracy == 1.0 for tally in report.accuracy_by_sir["sps"].values())


def test_evaluation_rejects_bad_requests(untrained_pipeline: RecommenderPipeline, small_dataset: Dataset) -> None:
    with pytest.raises(PipelineConfigurationError):
        evaluate_pipeline(untrained_pipeline, small_dataset.subset(lambda _: False))
    with pytest.raises(PipelineConfigurationError):
        evaluate_pipeline(untrained_pipeline, small_dataset, oracle_stages={"method"})
    with pytest.raises(PipelineConfigurationError):
        evaluate_pipeline(untrained_pipeline, small_dataset, oracle_stages={"noise"})
    with pytest.raises(PipelineConfigurationError):
        evaluate_pipeline(untrained_pipeline, small_dataset, chunk_size=0)

    longer = generate_dataset(small_dataset.config.replace(frame_len=1024, examples_per_bin=1))
    with pytest.raises(PipelineConfigurationError):
        evaluate_pipeline(untrained_pipeline, longer)


def test_pipeline_manifest_loads_saved_checkpoints(
    untrained_pipeline: RecommenderPipeline, small_dataset: Dataset, tmp_path: Path
) -> None:
    models = tmp_path / "models"
    save_model(untrained_pipeline.sps_model, models / "sps.sicw")
    save_model(untrained_pipeline.sir_model, models / "sir.sicw")
    bank = ModelBank(
        {
            sps: save_model(untrained_pipeline.unet_bank.get(sps), models / f"unet_sps{sps}.sicw")
            for sps in small_dataset.config.interferer_sps_set
        }
    )
    bank.write_manifest(models / "unet_bank.json")
    manifest = PipelineManifest(
        scenario=untrained_pipeline.scenario,
        sic_defaults=untrained_pipeline.sic_defaults,
        bank_manifest="unet_bank.json",
        sps_checkpoint="sps.sicw",
        sir_checkpoint="sir.sicw",
    )
    path = write_pipeline_manifest(manifest, models / "pipeline.json")

    assert read_pipeline_manifest(path) == manifest
    loaded = load_pipeline(path)

    assert loaded.method_model is None
    assert loaded.unet_bank.sps_values == (4, 16, 32)
    mixture = small_dataset[3].mixture
    original = run(untrained_pipeline, mixture, StageOverrides(method=SIC))
    restored = run(loaded, mixture, StageOverrides(method=SIC))
    np.testing.assert_allclose(restored.trace.sps_posteriors, original.trace.sps_posteriors, atol=1e-4)
    np.testing.assert_allclose(restored.trace.sir_posteriors, original.trace.sir_posteriors, atol=1e-4)
    with pytest.raises(PipelineConfigurationError):
        run(loaded, mixture)


def test_pipeline_manifest_errors(tmp_path: Path) -> None:
    with pytest.raises(PipelineConfigurationError):
        load_pipeline(tmp_path / "absent.json")
    path = tmp_path / "pipeline.json"
    path.write_text('{"version": 3}', encoding="utf-8")
    with pytest.raises(PipelineConfigurationError):
        read_pipeline_manifest(path)
