from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from sicunet.dsp import IqFrame, measure_power
from sicunet.models import (
    CnnClassifier,
    CnnClassifierSpec,
    InvalidFrameError,
    ModelBank,
    ModelBankError,
    ModelError,
    ModelLoadError,
    SUPPORTED_CLASS_COUNTS,
    UNet,
    UnetSpec,
    UnsupportedClassCountError,
    batch_to_frames,
    build_classifier,
    build_unet,
    classify,
    classify_batch,
    fit_classifier,
    fit_length,
    fit_unet,
    frames_to_batch,
    load_classifier,
    load_unet,
    recover_bits_from_denoised,
    save_model,
    unet_denoise,
    unet_training_pairs,
)
from sicunet.nn import TrainConfig, predict, softmax
from sicunet.scenario import Dataset, ScenarioConfig, generate_dataset, regenerate_example


def _frames(count: int, length: int, seed: int = 0) -> list[IqFrame]:
    rng = np.random.default_rng(seed)
    return [IqFrame(rng.standard_normal(length) + 1j * rng.standard_normal(length), sps=16) for _ in range(count)]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"num_classes": 3, "in_channels": 1},
        {"num_classes": 3, "input_length": 100},
    ],
)
def test_classifier_spec_validation(kwargs: dict) -> None:
    with pytest.raises(InvalidFrameError):
        CnnClassifierSpec(**kwargs)


@pytest.mark.parametrize("num_classes", [0, 1, 4, 20, 22])
def test_classifier_rejects_unsupported_class_counts(num_classes: int) -> None:
    with pytest.raises(UnsupportedClassCountError):
        CnnClassifierSpec(num_classes=num_classes)
    with pytest.raises(ModelError):
        build_classifier(num_classes)


@pytest.mark.parametrize("num_classes", SUPPORTED_CLASS_COUNTS)
def test_classifier_accepts_every_stage_class_count(num_classes: int) -> None:
    assert CnnClassifierSpec(num_classes=num_classes).num_classes == num_classes


def test_default_classifier_fits_full_frames() -> None:
    model = build_classifier(21, seed=3)

    assert model.spec.input_length == 8073
    assert model.spec.flattened_length() == 8073 // 256
    assert model.parameter_count() > 0


def test_classifier_posteriors(classifier_factory: Callable[..., CnnClassifier]) -> None:
    model = classifier_factory(3)
    frames = _frames(5, 512)

    posteriors = classify_batch(model, frames)
    single = classify(model, frames[2])

    assert posteriors.shape == (5, 3)
    np.testing.assert_allclose(posteriors.sum(axis=1), 1.0)
    np.testing.assert_allclose(single.posteriors, posteriors[2], rtol=1e-5)
    assert single.decision == int(np.argmax(single.posteriors))


def test_classifier_side_channels(classifier_factory: Callable[..., CnnClassifier]) -> None:
    model = classifier_factory(2, 3)
    frames = _frames(2, 512)

    posteriors = classify_batch(model, frames, side_values=[[0.5], [1.0]])
    assert posteriors.shape == (2, 2)
    assert classify(model, frames[0], side_values=[0.125]).posteriors.shape == (2,)

    with pytest.raises(InvalidFrameError):
        classify_batch(model, frames)
    with pytest.raises(InvalidFrameError):
        classify_batch(classifier_factory(2), frames, side_values=[[0.5], [1.0]])


def test_classifier_rejects_wrong_shape(classifier_factory: Callable[..., CnnClassifier]) -> None:
    with pytest.raises(InvalidFrameError):
        classifier_factory(2).forward(np.zeros((1, 2, 100), dtype=np.float32))


def test_untrained_classifier_decides_at_chance(
    small_dataset: Dataset, classifier_factory: Callable[..., CnnClassifier]
) -> None:
    # one frame per freshly seeded model keeps the trials independent
    trials = 300
    labels = small_dataset.sps_labels()
    hits = 0
    for seed in range(trials):
        index = seed % len(small_dataset)
        decision = classify(classifier_factory(3, seed=seed), small_dataset[index].mixture).decision
        hits += int(decision == labels[index])

    chance = 1.0 / 3.0
    assert abs(hits / trials - chance) <= 3.0 * math.sqrt(chance * (1.0 - chance) / trials)


@pytest.mark.parametrize("shift", [-1000.0, -2.5, 37.0, 1000.0])
def test_constant_logit_shift_keeps_posteriors_and_decisions(
    shift: float, classifier_factory: Callable[..., CnnClassifier]
) -> None:
    logits = np.random.default_rng(5).normal(size=(6, 21))
    np.testing.assert_allclose(softmax(logits + shift), softmax(logits), rtol=1e-12, atol=1e-15)

    model = classifier_factory(3, seed=4)
    frames = _frames(6, 512, seed=2)
    before = classify_batch(model, frames)
    model.body.layers[-1].bias += shift
    after = classify_batch(model, frames)

    np.testing.assert_array_equal(np.argmax(after, axis=1), np.argmax(before, axis=1))
    np.testing.assert_allclose(after, before, rtol=1e-9, atol=1e-12)


def test_frames_to_batch_normalises_and_appends_side_channels() -> None:
    frames = [IqFrame(np.full(8, 2.0 + 0j)), IqFrame(np.full(8, 0.5j))]

    batch, scales = frames_to_batch(frames, 10, side_values=[[1.0, -1.0], [0.0, 2.0]])

    assert batch.shape == (2, 4, 10)
    np.testing.assert_allclose(scales, [0.5, 2.0])
    np.testing.assert_allclose(batch[0, 0, :8], 1.0)
    np.testing.assert_allclose(batch[1, 1, :8], 1.0)
    np.testing.assert_array_equal(batch[:, :2, 8:], 0.0)
    np.testing.assert_array_equal(batch[1, 3], 2.0)

    restored = batch_to_frames(batch[:, :2, :8], scales, sps=16)
    np.testing.assert_allclose(restored[0].samples, frames[0].samples)
    assert restored[1].sps == 16


def test_frames_to_batch_rejects_mixed_lengths() -> None:
    with pytest.raises(InvalidFrameError):
        frames_to_batch([IqFrame(np.ones(4)), IqFrame(np.ones(5))])
    with pytest.raises(InvalidFrameError):
        frames_to_batch([])


def test_fit_length_crops_and_pads() -> None:
    channels = np.arange(12, dtype=np.float64).reshape(2, 6)

    assert fit_length(channels, 4).shape == (2, 4)
    padded = fit_length(channels, 9)
    assert padded.shape == (2, 9)
    np.testing.assert_array_equal(padded[:, 6:], 0.0)
    assert fit_length(channels, 6) is channels


@pytest.mark.parametrize("length", [4, 9, 64, 513])
def test_unet_preserves_frame_length(tiny_unet_spec: UnetSpec, length: int) -> None:
    model = build_unet(tiny_unet_spec, seed=1)

    out = model.forward(np.zeros((2, 2, length)))

    assert out.shape == (2, 2, length)


def test_unet_rejects_short_or_malformed_input(tiny_unet_spec: UnetSpec) -> None:
    model = build_unet(tiny_unet_spec)
    with pytest.raises(InvalidFrameError):
        model.forward(np.zeros((1, 2, 3)))
    with pytest.raises(InvalidFrameError):
        model.forward(np.zeros((1, 3, 16)))
    with pytest.raises(InvalidFrameError):
        UnetSpec(kernel_size=4)


def test_unet_denoise_keeps_frame_metadata(tiny_unet_spec: UnetSpec) -> None:
    frame = _frames(1, 300)[0]

    estimate = unet_denoise(build_unet(tiny_unet_spec), frame)

    assert len(estimate) == len(frame)
    assert estimate.sps == frame.sps


def test_bits_recovered_from_clean_soi(small_dataset: Dataset) -> None:
    config = small_dataset.config
    for example_id in (0, 9, 17):
        example = regenerate_example(config, example_id)
        decided = recover_bits_from_denoised(example.soi, config.soi_shape())
        np.testing.assert_array_equal(decided, example.soi_bits)


def test_pure_interferer_estimate_recovers_soi_bits_at_chance() -> None:
    config = ScenarioConfig(sir_bins_db=(0,), examples_per_bin=4, seed=21)
    soi_shape = config.soi_shape()

    errors = bits = 0
    for example_id in range(config.example_count):
        example = regenerate_example(config, example_id)
        decided = recover_bits_from_denoised(example.interferer, soi_shape)
        errors += int(np.count_nonzero(decided != example.soi_bits))
        bits += example.soi_bits.size

    assert bits >= 10_000
    assert abs(errors / bits - 0.5) <= 3.0 * math.sqrt(0.25 / bits)


def _held_out_mse(model: UNet, mixtures: list[IqFrame], targets: list[IqFrame]) -> float:
    inputs, clean = unet_training_pairs(mixtures, targets, np.float64)
    return float(np.mean((predict(model, inputs.astype(model.blocks["head"].weight.dtype)) - clean) ** 2))


def test_every_bank_entry_reduces_held_out_error(small_scenario: ScenarioConfig, tiny_unet_spec: UnetSpec) -> None:
    train = generate_dataset(small_scenario.replace(examples_per_bin=4))
    held_out = generate_dataset(small_scenario.replace(seed=8))
    training = TrainConfig(epochs=10, batch_size=3, lr=3e-3, track_accuracy=False)

    def split(dataset: Dataset, sps: int) -> tuple[list[IqFrame], list[IqFrame]]:
        subset = dataset.subset(lambda ex: dataset.interferer_sps(ex) == sps)
        targets = [regenerate_example(dataset.config, ex.example_id).soi for ex in subset]
        return [ex.mixture for ex in subset], targets

    for index, sps in enumerate(small_scenario.interferer_sps_set):
        model = build_unet(tiny_unet_spec, seed=index)
        before = _held_out_mse(model, *split(held_out, sps))

        fit_unet(model, *split(train, sps), training.replace(seed=index))

        assert _held_out_mse(model, *split(held_out, sps)) < before, sps


def test_unet_training_pairs_share_the_mixture_gain(small_dataset: Dataset) -> None:
    config = small_dataset.config
    examples = [regenerate_example(config, i) for i in range(3)]

    inputs, clean = unet_training_pairs([ex.mixture for ex in examples], [ex.soi for ex in examples], np.float64)

    for row, example in enumerate(examples):
        gain = 1.0 / math.sqrt(measure_power(example.mixture))
        np.testing.assert_allclose(clean[row], example.soi.to_channels() * gain, rtol=1e-12)
        assert float(np.mean(np.sum(inputs[row] ** 2, axis=0))) == pytest.approx(1.0)
    with pytest.raises(InvalidFrameError):
        unet_training_pairs([examples[0].mixture], [])


def test_fit_unet_and_classifier_run(
    small_dataset: Dataset,
    tiny_unet_spec: UnetSpec,
    classifier_factory: Callable[..., CnnClassifier],
) -> None:
    config = small_dataset.config
    subset = small_dataset.subset(lambda ex: small_dataset.interferer_sps(ex) == 16)
    targets = [regenerate_example(config, ex.example_id).soi for ex in subset]
    training = TrainConfig(epochs=2, batch_size=2, lr=1e-3, track_accuracy=False)

    unet_result = fit_unet(build_unet(tiny_unet_spec), [ex.mixture for ex in subset], targets, training)
    assert len(unet_result.loss_history) == 2

    model = classifier_factory(config.num_sps_classes)
    result = fit_classifier(model, [ex.mixture for ex in small_dataset], small_dataset.sps_labels(), training)
    assert result.steps == 2 * 9

    with pytest.raises(InvalidFrameError):
        fit_classifier(model, [ex.mixture for ex in small_dataset], small_dataset.sps_labels(), training, side_values=np.zeros((18, 1)))


def test_model_files_round_trip(
    tmp_path: Path, tiny_unet_spec: UnetSpec, classifier_factory: Callable[..., CnnClassifier]
) -> None:
    classifier = classifier_factory(3).astype(np.float32)
    unet = build_unet(tiny_unet_spec, seed=4).astype(np.float32)
    classifier_path = save_model(classifier, tmp_path / "sps.sicw", metadata={"stage": "sps"})
    unet_path = save_model(unet, tmp_path / "unet.sicw")

    restored = load_classifier(classifier_path)
    frames = _frames(2, 512)
    np.testing.assert_allclose(classify_batch(restored, frames), classify_batch(classifier, frames), rtol=1e-6)
    assert load_unet(unet_path).spec == tiny_unet_spec

    with pytest.raises(ModelLoadError):
        load_unet(classifier_path)
    with pytest.raises(ModelLoadError):
        load_classifier(tmp_path / "missing.sicw")


def test_model_bank_lookup(tiny_unet_spec: UnetSpec) -> None:
    bank = ModelBank({16: build_unet(tiny_unet_spec), 4: build_unet(tiny_unet_spec, seed=1)})

    assert bank.sps_values == (4, 16)
    assert 16 in bank and 32 not in bank
    assert bank.get(16).mode == "infer"
    with pytest.raises(ModelBankError):
        bank.get(32)
    with pytest.raises(ModelBankError, match="train unet"):
        bank.require_complete((32, 16, 4))
    with pytest.raises(ModelBankError):
        bank.to_manifest()


def test_model_bank_manifest_loads_lazily_once(tmp_path: Path, tiny_unet_spec: UnetSpec) -> None:
    entries = {sps: save_model(build_unet(tiny_unet_spec, seed=sps), tmp_path / f"unet_sps{sps}.sicw") for sps in (32, 16, 4)}
    manifest = ModelBank(entries, training={16: {"final_loss": 0.5}}).write_manifest(tmp_path / "bank.json")

    payload = json.loads(manifest.read_text(encoding="utf-8"))
    assert payload["entries"]["16"] == {"checkpoint": "unet_sps16.sicw", "training": {"final_loss": 0.5}}

    bank = ModelBank.from_manifest(manifest)
    bank.require_complete((32, 16, 4))
    with ThreadPoolExecutor(max_workers=4) as pool:
        loaded = list(pool.map(lambda _: bank.get(16), range(8)))
    assert all(model is loaded[0] for model in loaded)
    assert bank.training[16] == {"final_loss": 0.5}


def test_model_bank_rejects_bad_manifest(tmp_path: Path) -> None:
    path = tmp_path / "bank.json"
    path.write_text(json.dumps({"version": 99, "entries": {}}), encoding="utf-8")
    with pytest.raises(ModelLoadError):
        ModelBank.from_manifest(path)

    path.write_text("not json", encoding="utf-8")
    with pytest.raises(ModelLoadError):
        ModelBank.from_manifest(path)
