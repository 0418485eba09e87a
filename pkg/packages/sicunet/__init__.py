"""Interference-mitigation recommender choosing between SIC and a U-Net denoiser bank for QPSK mixtures."""

from __future__ import annotations

from pathlib import Path
from typing import AbstractSet

from . import cli, dsp, evaluation, models, nn, pipeline, scenario, sic
from .dsp import (
    DspError,
    InvalidSignalError,
    IqFrame,
    PulseShape,
    design_rrc,
    mix_at_sir,
    qpsk_hard_decision,
    qpsk_modulate,
)
from .evaluation import (
    BerCount,
    ConfusionMatrix,
    EvalReport,
    EvaluationError,
    ber,
    confusion,
    emit_report,
    read_report,
    within_k_accuracy,
    write_report,
)
from .models import (
    CnnClassifier,
    ModelBank,
    ModelBankError,
    ModelError,
    UNet,
    build_classifier,
    build_unet,
    classify,
    recover_bits_from_denoised,
    unet_denoise,
)
from .nn import TrainConfig, TrainResult, gradient_check, train_epochs
from .pipeline import (
    MethodLabels,
    PipelineConfigurationError,
    PipelineError,
    PipelineOutput,
    RecommenderPipeline,
    StageOverrides,
    build_method_ground_truth,
    evaluate_pipeline,
    load_pipeline,
    run,
)
from .scenario import (
    Dataset,
    InvalidScenarioError,
    LabeledExample,
    ScenarioConfig,
    ScenarioError,
    generate_dataset,
    read_dataset,
    write_dataset,
)
from .sic import SicConfig, SicError, SicResult, sic_cancel

__all__ = [
    "cli",
    "dsp",
    "evaluation",
    "models",
    "nn",
    "pipeline",
    "scenario",
    "sic",
    "IqFrame",
    "PulseShape",
    "qpsk_modulate",
    "qpsk_hard_decision",
    "design_rrc",
    "mix_at_sir",
    "ScenarioConfig",
    "LabeledExample",
    "Dataset",
    "generate_dataset",
    "read_dataset",
    "write_dataset",
    "TrainConfig",
    "TrainResult",
    "train_epochs",
    "gradient_check",
    "CnnClassifier",
    "UNet",
    "ModelBank",
    "build_classifier",
    "build_unet",
    "classify",
    "unet_denoise",
    "recover_bits_from_denoised",
    "SicConfig",
    "SicResult",
    "sic_cancel",
    "RecommenderPipeline",
    "StageOverrides",
    "PipelineOutput",
    "MethodLabels",
    "run",
    "build_method_ground_truth",
    "evaluate_pipeline",
    "load_pipeline",
    "BerCount",
    "ConfusionMatrix",
    "EvalReport",
    "ber",
    "confusion",
    "within_k_accuracy",
    "emit_report",
    "read_report",
    "write_report",
    "DspError",
    "InvalidSignalError",
    "ScenarioError",
    "InvalidScenarioError",
    "ModelError",
    "ModelBankError",
    "SicError",
    "PipelineError",
    "PipelineConfigurationError",
    "EvaluationError",
    "generate_scenario",
    "evaluate_study",
    "report_study",
]


def generate_scenario(config: ScenarioConfig, output: str | Path | None = None, *, workers: int = 1) -> Dataset:
    """Convenience wrapper around :func:`scenario.generate_dataset`."""

    return generate_dataset(config, output, workers=workers)


def evaluate_study(
    manifest: str | Path,
    dataset: str | Path | Dataset,
    *,
    oracle_stages: AbstractSet[str] = frozenset(),
    method_labels: MethodLabels | None = None,
) -> EvalReport:
    """Load a pipeline manifest and evaluate it on a dataset file or in-memory dataset."""

    loaded = dataset if isinstance(dataset, Dataset) else read_dataset(dataset)
    return evaluate_pipeline(
        load_pipeline(manifest),
        loaded,
        oracle_stages=oracle_stages,
        method_labels=method_labels,
    )


def report_study(report: str | Path | EvalReport, out_dir: str | Path) -> list[Path]:
    """Convenience wrapper around :func:`evaluation.emit_report`."""

    loaded = report if isinstance(report, EvalReport) else read_report(report)
    return emit_report(loaded, out_dir)
