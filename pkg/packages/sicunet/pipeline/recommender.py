"""The four-stage recommender: sps, SIR, method choice, mitigation."""

from __future__ import annotations

import dataclasses
import logging
from typing import Sequence

import numpy as np
import numpy.typing as npt

from ..dsp import IqFrame
from ..dsp.types import BitArray
from ..models import CnnClassifier, ModelBank, ModelBankError, classify_batch
from ..scenario import ScenarioConfig
from ..sic import SicConfig
from .exceptions import PipelineConfigurationError
from .mitigation import METHOD_NAMES, SIC, SICUNET, sic_bits, unet_bits

LOGGER = logging.getLogger("sicunet.pipeline")

SPS_SCALE = 32.0
SIR_SCALE = 10.0


def method_side_values(sps: int, sir_db: float | None = None) -> list[float]:
    """Constant side channels fed to the method classifier next to I and Q."""

    values = [sps / SPS_SCALE]
    if sir_db is not None:
        values.append(sir_db / SIR_SCALE)
    return values


def method_in_channels(uses_sir: bool) -> int:
    return 4 if uses_sir else 3


def sic_defaults_for(scenario: ScenarioConfig, **changes: object) -> SicConfig:
    """SIC template matching a scenario's SOI pulse and frame length."""

    base = SicConfig(
        soi_sps=scenario.soi_sps,
        interferer_sps=scenario.interferer_sps_set[0],
        roll_off=scenario.roll_off,
        span_symbols=scenario.span_symbols,
        frame_len=scenario.frame_len,
    )
    return dataclasses.replace(base, **changes) if changes else base


@dataclasses.dataclass(frozen=True, slots=True)
class StageOverrides:
    """Values injected in place of a stage's prediction.

    ``sps`` is an interferer sps value, ``sir_db`` a SIR in dB and ``method``
    one of :data:`SIC` / :data:`SICUNET`.
    """

    sps: int | None = None
    sir_db: float | None = None
    method: int | None = None

    def names(self) -> tuple[str, ...]:
        pairs = (("sps", self.sps), ("sir", self.sir_db), ("method", self.method))
        return tuple(name for name, value in pairs if value is not None)


@dataclasses.dataclass(frozen=True, slots=True)
class StageTrace:
    predicted_sps: int
    sps_posteriors: npt.NDArray[np.float64] | None
    predicted_sir_db: float
    sir_posteriors: npt.NDArray[np.float64] | None
    chosen_method: int
    method_posteriors: npt.NDArray[np.float64] | None
    overridden: tuple[str, ...] = ()

    @property
    def method_name(self) -> str:
        return METHOD_NAMES[self.chosen_method]


@dataclasses.dataclass(frozen=True, slots=True)
class PipelineOutput:
    soi_bits: BitArray
    trace: StageTrace


@dataclasses.dataclass(frozen=True, slots=True)
class RecommenderPipeline:
    """Three stage classifiers, the U-Net bank and the SIC template.

    A classifier may be ``None`` only when every call overrides its stage.
    """

    scenario: ScenarioConfig
    sps_model: CnnClassifier | None
    sir_model: CnnClassifier | None
    method_model: CnnClassifier | None
    unet_bank: ModelBank
    sic_defaults: SicConfig
    method_uses_sir: bool = False

    def __post_init__(self) -> None:
        checks = (
            ("sps", self.sps_model, self.scenario.num_sps_classes, 2),
            ("sir", self.sir_model, self.scenario.num_sir_classes, 2),
            ("method", self.method_model, 2, method_in_channels(self.method_uses_sir)),
        )
        for stage, model, classes, channels in checks:
            if model is None:
                continue
            if model.spec.num_classes != classes or model.spec.in_channels != channels:
                raise PipelineConfigurationError(
                    f"{stage} model has {model.spec.num_classes} classes and {model.spec.in_channels} inputs; "
                    f"expected {classes} and {channels}"
                )
            if model.spec.input_length != self.scenario.frame_len:
                LOGGER.warning(
                    "%s model expects %d samples; frames of %d will be padded or cropped",
                    stage,
                    model.spec.input_length,
                    self.scenario.frame_len,
                )
        try:
            self.unet_bank.require_complete(self.scenario.interferer_sps_set)
        except ModelBankError as exc:
            raise PipelineConfigurationError(str(exc)) from exc
        if self.sic_defaults.soi_sps != self.scenario.soi_sps:
            raise PipelineConfigurationError("SIC defaults and scenario disagree on the SOI sps")

    def run(self, mixture: IqFrame, overrides: StageOverrides | None = None) -> PipelineOutput:
        return run(self, mixture, overrides)


def _require(model: CnnClassifier | None, stage: str) -> CnnClassifier:
    if model is None:
        raise PipelineConfigurationError(f"No {stage} model loaded and the stage is not overridden")
    return model


def _posteriors(
    model: CnnClassifier | None,
    mixtures: Sequence[IqFrame],
    needed: bool,
    stage: str,
    side: Sequence[Sequence[float]] | None = None,
) -> npt.NDArray[np.float64] | None:
    if model is None:
        if needed:
            _require(model, stage)
        return None
    return classify_batch(model, mixtures, side_values=side)


def stage_traces(
    pipeline: RecommenderPipeline,
    mixtures: Sequence[IqFrame],
    overrides: Sequence[StageOverrides],
) -> list[StageTrace]:
    """Run Stages 1 to 3 over a batch of mixtures."""

    config = pipeline.scenario
    sps_post = _posteriors(pipeline.sps_model, mixtures, any(o.sps is None for o in overrides), "sps")
    sir_post = _posteriors(pipeline.sir_model, mixtures, any(o.sir_db is None for o in overrides), "sir")

    sps_values: list[int] = []
    sir_values: list[float] = []
    for row, override in enumerate(overrides):
        if override.sps is not None:
            if override.sps not in config.interferer_sps_set:
                raise PipelineConfigurationError(f"Override sps {override.sps} is not configured")
            sps_values.append(int(override.sps))
        else:
            sps_values.append(config.sps_for_class(int(np.argmax(sps_post[row]))))
        if override.sir_db is not None:
            sir_values.append(float(override.sir_db))
        else:
            sir_values.append(float(config.sir_db_for_class(int(np.argmax(sir_post[row])))))

    side = [
        method_side_values(sps, sir if pipeline.method_uses_sir else None) for sps, sir in zip(sps_values, sir_values)
    ]
    method_post = _posteriors(
        pipeline.method_model, mixtures, any(o.method is None for o in overrides), "method", side=side
    )

    traces = []
    for row, override in enumerate(overrides):
        if override.method is not None:
            if override.method not in (SIC, SICUNET):
                raise PipelineConfigurationError(f"Unknown method override {override.method}")
            method = int(override.method)
        else:
            method = int(np.argmax(method_post[row]))
        names = override.names()
        if names:
            LOGGER.debug("Stages %s overridden", ", ".join(names))
        traces.append(
            StageTrace(
                predicted_sps=sps_values[row],
                sps_posteriors=None if sps_post is None else sps_post[row],
                predicted_sir_db=sir_values[row],
                sir_posteriors=None if sir_post is None else sir_post[row],
                chosen_method=method,
                method_posteriors=None if method_post is None else method_post[row],
                overridden=names,
            )
        )
    return traces


def run_batch(
    pipeline: RecommenderPipeline,
    mixtures: Sequence[IqFrame],
    overrides: Sequence[StageOverrides] | None = None,
) -> list[PipelineOutput]:
    """Run all four stages; each mixture goes only through the method chosen for it."""

    overrides = list(overrides) if overrides is not None else [StageOverrides()] * len(mixtures)
    if len(overrides) != len(mixtures):
        raise PipelineConfigurationError(f"Got {len(overrides)} overrides for {len(mixtures)} mixtures")
    traces = stage_traces(pipeline, mixtures, overrides)

    bits: list[BitArray | None] = [None] * len(mixtures)
    unet_rows = [row for row, trace in enumerate(traces) if trace.chosen_method == SICUNET]
    for row, trace in enumerate(traces):
        if trace.chosen_method == SIC:
            bits[row] = sic_bits(mixtures[row], pipeline.sic_defaults, trace.predicted_sps, trace.predicted_sir_db)
    if unet_rows:
        recovered = unet_bits(
            pipeline.unet_bank,
            [mixtures[row] for row in unet_rows],
            [traces[row].predicted_sps for row in unet_rows],
            pipeline.sic_defaults.soi_shape,
        )
        for row, value in zip(unet_rows, recovered):
            bits[row] = value
    return [PipelineOutput(soi_bits=value, trace=trace) for value, trace in zip(bits, traces)]


def run(pipeline: RecommenderPipeline, mixture: IqFrame, overrides: StageOverrides | None = None) -> PipelineOutput:
    """Run the recommender on one mixture.

    Raises:
        PipelineConfigurationError: If a needed model or bank entry is missing.
    """

    return run_batch(pipeline, [mixture], [overrides or StageOverrides()])[0]
