from __future__ import annotations

from pathlib import Path
from typing import Callable
import sys

import numpy as np
import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
PACKAGES_DIR = PROJECT_ROOT / "packages"

for path in (PROJECT_ROOT, PACKAGES_DIR):
    if str(path) not in sys.path:
        sys.path.insert(0, str(path))

from sicunet.models import CnnClassifier, CnnClassifierSpec, ModelBank, UnetSpec, build_unet  # noqa: E402
from sicunet.pipeline import RecommenderPipeline, method_in_channels, sic_defaults_for  # noqa: E402
from sicunet.scenario import Dataset, ScenarioConfig, generate_dataset  # noqa: E402

SMALL_FRAME_LEN = 512
TINY_BLOCKS = ((4, 5, 8), (4, 5, 8))


@pytest.fixture()
def small_scenario() -> ScenarioConfig:
    return ScenarioConfig(frame_len=SMALL_FRAME_LEN, sir_bins_db=(-10, 0, 10), examples_per_bin=2, seed=7)


@pytest.fixture()
def small_dataset(small_scenario: ScenarioConfig) -> Dataset:
    return generate_dataset(small_scenario)


@pytest.fixture()
def tiny_unet_spec() -> UnetSpec:
    return UnetSpec(depth=2, base_channels=4, kernel_size=5)


@pytest.fixture()
def classifier_factory() -> Callable[..., CnnClassifier]:
    def _create(num_classes: int, in_channels: int = 2, *, seed: int = 0, length: int = SMALL_FRAME_LEN) -> CnnClassifier:
        spec = CnnClassifierSpec(
            num_classes=num_classes,
            in_channels=in_channels,
            input_length=length,
            conv_blocks=TINY_BLOCKS,
            hidden_width=8,
        )
        return CnnClassifier(spec, seed=seed)

    return _create


@pytest.fixture()
def untrained_pipeline(
    small_scenario: ScenarioConfig,
    tiny_unet_spec: UnetSpec,
    classifier_factory: Callable[..., CnnClassifier],
) -> RecommenderPipeline:
    bank = ModelBank(
        {sps: build_unet(tiny_unet_spec, seed=index) for index, sps in enumerate(small_scenario.interferer_sps_set)}
    )
    return RecommenderPipeline(
        scenario=small_scenario,
        sps_model=classifier_factory(small_scenario.num_sps_classes, seed=1),
        sir_model=classifier_factory(small_scenario.num_sir_classes, seed=2),
        method_model=classifier_factory(2, method_in_channels(False), seed=3),
        unet_bank=bank,
        sic_defaults=sic_defaults_for(small_scenario),
    )


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
