"""The study commands: generate, train, labels, evaluate and report.

Each command reads its prerequisites from a :class:`Workspace`, writes its
outputs there and returns a small summary for the caller to print.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import AbstractSet, Any

from ..evaluation import EvalReport, emit_report, read_report, write_report
from ..models import (
    ModelBank,
    build_classifier,
    build_unet,
    fit_classifier,
    fit_unet,
    save_model,
)
from ..pipeline import (
    MethodLabels,
    PipelineManifest,
    build_method_ground_truth,
    evaluate_pipeline,
    load_pipeline,
    method_in_channels,
    method_side_values,
    read_method_labels,
    sic_defaults_for,
    write_method_labels,
    write_pipeline_manifest,
)
from ..scenario import Dataset, ScenarioConfig, generate_dataset, read_dataset, regenerate_example
from ..utils import PathLike, canonical_json, resolve_path, write_text_atomic
from .config import TRAIN_STAGES, RunConfig
from .exceptions import ConfigError, DataError, MissingArtifactError
from .workspace import Workspace

LOGGER = logging.getLogger("sicunet.cli")

SPLITS: tuple[str, ...] = ("train", "test")
CLASSIFIER_STAGES: tuple[str, ...] = ("sps", "sir", "method")


def _scenario_for(run: RunConfig, split: str) -> ScenarioConfig:
    if split not in SPLITS:
        raise ConfigError(f"Unknown dataset split {split!r}; choose one of {', '.join(SPLITS)}")
    return run.train_scenario() if split == "train" else run.test_scenario()


def load_split(run: RunConfig, workspace: Workspace, split: str) -> Dataset:
    """Read a generated dataset, checking it still matches the run configuration."""

    path = workspace.dataset(split)
    if not path.exists():
        raise DataError(f"No {split} dataset at {path}; run `sicunet generate` first")
    dataset = read_dataset(path)
    if dataset.config != _scenario_for(run, split):
        raise ConfigError(
            f"The {split} dataset at {path} was generated with a different configuration; re-run `sicunet generate`"
        )
    return dataset


def _load_labels(workspace: Workspace, split: str, *, required: bool) -> MethodLabels | None:
    path = workspace.method_labels(split)
    if not path.exists():
        if required:
            raise DataError(f"No method labels for the {split} set at {path}; run `sicunet labels --split {split}`")
        return None
    return read_method_labels(path)


def _require_checkpoint(path: Path, command: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(f"Missing model file {path}; run `sicunet {command}` first")
    return path


def cmd_generate(run: RunConfig, workspace: Workspace) -> dict[str, Any]:
    """Generate the training and test datasets."""

    written = {}
    for split in SPLITS:
        dataset = generate_dataset(_scenario_for(run, split), workspace.dataset(split), workers=run.workers)
        written[split] = {"path": workspace.dataset(split).as_posix(), "examples": len(dataset)}
    write_text_atomic(workspace.run_config, canonical_json(run.to_dict()) + "\n")
    return {"command": "generate", "datasets": written}


def _train_classifier(run: RunConfig, workspace: Workspace, stage: str) -> dict[str, Any]:
    dataset = load_split(run, workspace, "train")
    config = dataset.config
    frames = [example.mixture for example in dataset]
    train_config = run.train_config(stage)
    side = None
    if stage == "sps":
        classes, labels, channels = config.num_sps_classes, dataset.sps_labels(), 2
    elif stage == "sir":
        classes, labels, channels = config.num_sir_classes, dataset.sir_labels(), 2
    else:
        method_labels = _load_labels(workspace, "train", required=True)
        classes, channels = 2, method_in_channels(run.method_uses_sir)
        labels = [method_labels.label_for(example.example_id) for example in dataset]
        # Stage 3 learns from the true sps and SIR bin, as its labels do
        side = [
            method_side_values(
                dataset.interferer_sps(example),
                dataset.sir_bin_db(example) if run.method_uses_sir else None,
            )
            for example in dataset
        ]
    model = build_classifier(classes, in_channels=channels, input_length=config.frame_len, seed=train_config.seed)
    result = fit_classifier(model, frames, labels, train_config, side_values=side)
    path = save_model(
        model,
        workspace.classifier(stage),
        metadata={"stage": stage, "run": run.to_dict(), "training": result.to_dict()},
    )
    return {"command": f"train {stage}", "checkpoint": path.as_posix(), "final_loss": result.final_loss}


def _train_unet_bank(run: RunConfig, workspace: Workspace) -> dict[str, Any]:
    dataset = load_split(run, workspace, "train")
    config = dataset.config
    train_config = run.train_config("unet")
    entries: dict[int, Path] = {}
    echoes: dict[int, dict[str, Any]] = {}
    for index, sps in enumerate(config.interferer_sps_set):
        subset = dataset.subset(lambda example, sps=sps: dataset.interferer_sps(example) == sps)
        if not len(subset):
            raise DataError(f"The training set has no examples with interferer sps {sps}")
        targets = [regenerate_example(config, example.example_id).soi for example in subset]
        model = build_unet(run.unet, seed=train_config.seed + index)
        LOGGER.info("Training U-Net for interferer sps %d on %d examples", sps, len(subset))
        result = fit_unet(model, [example.mixture for example in subset], targets, train_config)
        entries[sps] = save_model(
            model,
            workspace.unet(sps),
            metadata={"stage": "unet", "sps": sps, "run": run.to_dict(), "training": result.to_dict()},
        )
        echoes[sps] = {"config": train_config.to_dict(), "final_loss": result.final_loss}
    manifest = ModelBank(entries, training=echoes).write_manifest(workspace.bank_manifest)
    return {"command": "train unet", "bank_manifest": manifest.as_posix(), "sps": list(entries)}


def cmd_train(stage: str, run: RunConfig, workspace: Workspace) -> dict[str, Any]:
    """Train one stage classifier, or the whole U-Net bank for ``stage="unet"``."""

    if stage not in TRAIN_STAGES:
        raise ConfigError(f"Unknown training stage {stage!r}; choose one of {', '.join(TRAIN_STAGES)}")
    if stage == "unet":
        return _train_unet_bank(run, workspace)
    return _train_classifier(run, workspace, stage)


def _bank(workspace: Workspace) -> ModelBank:
    return ModelBank.from_manifest(_require_checkpoint(workspace.bank_manifest, "train unet"))


def cmd_labels(run: RunConfig, workspace: Workspace, *, split: str = "train") -> dict[str, Any]:
    """Build Stage-3 method labels for one dataset split."""

    dataset = load_split(run, workspace, split)
    labels = build_method_ground_truth(dataset, _bank(workspace), sic_defaults_for(dataset.config))
    labels.config["run"] = run.to_dict()
    path = write_method_labels(labels, workspace.method_labels(split))
    return {"command": "labels", "split": split, "labels": path.as_posix(), "ties": labels.tie_count}


def write_workspace_pipeline(run: RunConfig, workspace: Workspace) -> Path:
    """Write the pipeline manifest for the checkpoints present in ``workspace``."""

    for stage in CLASSIFIER_STAGES:
        _require_checkpoint(workspace.classifier(stage), f"train {stage}")
    _require_checkpoint(workspace.bank_manifest, "train unet")
    base = workspace.checkpoints
    manifest = PipelineManifest(
        scenario=run.train_scenario(),
        sic_defaults=sic_defaults_for(run.train_scenario()),
        bank_manifest=workspace.bank_manifest.relative_to(base).as_posix(),
        sps_checkpoint=workspace.classifier("sps").relative_to(base).as_posix(),
        sir_checkpoint=workspace.classifier("sir").relative_to(base).as_posix(),
        method_checkpoint=workspace.classifier("method").relative_to(base).as_posix(),
        method_uses_sir=run.method_uses_sir,
    )
    return write_pipeline_manifest(manifest, workspace.pipeline_manifest)


def cmd_evaluate(
    run: RunConfig,
    workspace: Workspace,
    *,
    split: str = "test",
    oracle_stages: AbstractSet[str] = frozenset(),
) -> dict[str, Any]:
    """Evaluate the full pipeline and both standalone methods, then emit the report."""

    pipeline = load_pipeline(write_workspace_pipeline(run, workspace))
    dataset = load_split(run, workspace, split)
    labels = _load_labels(workspace, split, required="method" in oracle_stages)
    report = evaluate_pipeline(pipeline, dataset, oracle_stages=oracle_stages, method_labels=labels)
    report.config["run"] = run.to_dict()
    report.config["split"] = split
    report_path = write_report(report, workspace.report)
    written = emit_report(report, workspace.reports)
    return {
        "command": "evaluate",
        "report": report_path.as_posix(),
        "files": len(written),
        "accuracy": _accuracies(report),
    }


def cmd_report(report_path: PathLike, out_dir: PathLike | None = None) -> dict[str, Any]:
    """Re-emit CSV and SVG artifacts from a saved report."""

    source = resolve_path(report_path)
    if not source.exists():
        raise DataError(f"No report at {source}; run `sicunet evaluate` first")
    report = read_report(source)
    written = emit_report(report, out_dir if out_dir is not None else source.parent)
    return {"command": "report", "seed": report.seed, "files": len(written), "accuracy": _accuracies(report)}


def _accuracies(report: EvalReport) -> dict[str, float]:
    values = {stage: report.stage_accuracy(stage).accuracy for stage in report.confusion}
    if "sir" in report.confusion:
        values["sir_within_1"] = report.sir_within_one_bin().accuracy
    return values
