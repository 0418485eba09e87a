"""The Full SICU-Net recommender pipeline."""

from __future__ import annotations

from .evaluate import evaluate_pipeline, oracle_overrides
from .exceptions import PipelineConfigurationError, PipelineError
from .labels import (
    LABELS_VERSION,
    MethodLabels,
    MethodOutcome,
    build_method_ground_truth,
    method_outcomes,
    read_method_labels,
    write_method_labels,
)
from .manifest import (
    PIPELINE_MANIFEST_VERSION,
    PipelineManifest,
    load_pipeline,
    read_pipeline_manifest,
    write_pipeline_manifest,
)
from .mitigation import METHOD_NAMES, SIC, SICUNET, sic_bits, unet_bits
from .recommender import (
    PipelineOutput,
    RecommenderPipeline,
    StageOverrides,
    StageTrace,
    method_in_channels,
    method_side_values,
    run,
    run_batch,
    sic_defaults_for,
    stage_traces,
)

__all__ = [
    "LABELS_VERSION",
    "METHOD_NAMES",
    "PIPELINE_MANIFEST_VERSION",
    "SIC",
    "SICUNET",
    "MethodLabels",
    "MethodOutcome",
    "PipelineConfigurationError",
    "PipelineError",
    "PipelineManifest",
    "PipelineOutput",
    "RecommenderPipeline",
    "StageOverrides",
    "StageTrace",
    "build_method_ground_truth",
    "evaluate_pipeline",
    "load_pipeline",
    "method_in_channels",
    "method_outcomes",
    "method_side_values",
    "oracle_overrides",
    "read_method_labels",
    "read_pipeline_manifest",
    "run",
    "run_batch",
    "sic_bits",
    "sic_defaults_for",
    "stage_traces",
    "unet_bits",
    "write_method_labels",
    "write_pipeline_manifest",
]
