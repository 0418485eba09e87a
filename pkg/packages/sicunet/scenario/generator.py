"""Labelled QPSK-on-QPSK mixture generation."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..dsp import (
    IqFrame,
    add_awgn,
    contained_symbol_count,
    first_contained_symbol,
    generated_symbol_count,
    interferer_gain,
    measure_power,
    mix_at_sir,
    qpsk_modulate,
    shape_and_crop,
)
from ..dsp.types import PulseShape
from ..utils import PathLike
from .config import ScenarioConfig, nearest_sir_bin
from .dataset import Dataset, LabeledExample
from .storage import write_dataset
from .validators import validate_generation_request

LOGGER = logging.getLogger("sicunet.scenario")


def example_rng(seed: int, example_id: int) -> np.random.Generator:
    """Generator for one example, derived from ``(seed, example_id)`` only."""

    return np.random.default_rng(np.random.SeedSequence([seed, example_id]))


def _transmission(
    shape: PulseShape, frame_len: int, rng: np.random.Generator
) -> tuple[IqFrame, np.ndarray]:
    n_symbols = generated_symbol_count(frame_len, shape)
    bits = rng.integers(0, 2, size=2 * n_symbols, dtype=np.uint8)
    frame = shape_and_crop(qpsk_modulate(bits), shape, frame_len)
    first = first_contained_symbol(shape)
    count = contained_symbol_count(frame_len, shape)
    return frame, bits[2 * first : 2 * (first + count)].copy()


def generate_example(
    config: ScenarioConfig,
    sir_db: float,
    interferer_sps: int,
    rng: np.random.Generator,
    *,
    example_id: int = 0,
) -> LabeledExample:
    """Generate one labelled mixture of a unit-power SOI and a scaled interferer.

    The bit labels cover only symbols whose pulses lie completely inside the
    frame. The stored mixture is rounded to ``float32`` precision so that a
    written dataset reads back bit-exactly.

    Raises:
        InvalidScenarioError: If ``interferer_sps`` is not configured or
            ``sir_db`` is outside the bin range.
    """

    validate_generation_request(config, sir_db, interferer_sps)
    soi, soi_bits = _transmission(config.soi_shape(), config.frame_len, rng)
    soi = soi.scaled(1.0 / math.sqrt(measure_power(soi)))
    interferer, interferer_bits = _transmission(config.shape_for(interferer_sps), config.frame_len, rng)

    mixture = mix_at_sir(soi, interferer, sir_db)
    scaled_interferer = interferer.scaled(interferer_gain(soi, interferer, sir_db))
    if config.snr_db is not None:
        mixture = add_awgn(mixture, config.snr_db, rng)
    mixture = IqFrame(mixture.samples.astype(np.complex64).astype(np.complex128), sps=config.soi_sps)

    return LabeledExample(
        mixture=mixture,
        sps_class=config.sps_class(interferer_sps),
        sir_class=nearest_sir_bin(sir_db, config.sir_bins_db),
        true_sir_db=float(sir_db),
        soi_bits=soi_bits,
        interferer_bits=interferer_bits,
        example_id=int(example_id),
        soi=soi,
        interferer=scaled_interferer,
    )


def example_cell(config: ScenarioConfig, example_id: int) -> tuple[int, int]:
    """Return ``(sir_bin_db, interferer_sps)`` of the cell holding ``example_id``."""

    cell = example_id // config.examples_per_bin
    bin_index, sps_index = divmod(cell, config.num_sps_classes)
    return config.sir_bins_db[bin_index], config.interferer_sps_set[sps_index]


def example_sir_db(config: ScenarioConfig, sir_bin: int, rng: np.random.Generator) -> float:
    """True SIR of an example in ``sir_bin``; draws a uniform offset in fractional mode."""

    if not config.fractional_offsets:
        return float(sir_bin)
    low, high = config.offset_range_db
    return sir_bin + float(rng.uniform(low, high))


def regenerate_example(config: ScenarioConfig, example_id: int) -> LabeledExample:
    """Rebuild the example ``example_id`` of the dataset described by ``config``."""

    sir_bin, sps = example_cell(config, example_id)
    rng = example_rng(config.seed, example_id)
    sir_db = example_sir_db(config, sir_bin, rng)
    return generate_example(config, sir_db, sps, rng, example_id=example_id)


def _regenerate_stripped(args: tuple[ScenarioConfig, int]) -> LabeledExample:
    config, example_id = args
    example = regenerate_example(config, example_id)
    # datasets keep only what is persisted
    return LabeledExample(
        mixture=example.mixture,
        sps_class=example.sps_class,
        sir_class=example.sir_class,
        true_sir_db=example.true_sir_db,
        soi_bits=example.soi_bits,
        interferer_bits=example.interferer_bits,
        example_id=example.example_id,
    )


def generate_dataset(
    config: ScenarioConfig,
    destination: PathLike | None = None,
    *,
    workers: int = 1,
) -> Dataset:
    """Generate ``examples_per_bin`` examples for every (SIR bin, interferer SPS) cell.

    Args:
        config: Scenario description.
        destination: Optional file path; when given the dataset is written
            with :func:`write_dataset`.
        workers: Number of worker processes. Output order is always by
            ``example_id``.

    Returns:
        The generated :class:`Dataset`.
    """

    ids = range(config.example_count)
    LOGGER.info(
        "Generating %d examples (%d SIR bins x %d SPS x %d) with seed %d",
        config.example_count,
        config.num_sir_classes,
        config.num_sps_classes,
        config.examples_per_bin,
        config.seed,
    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            examples = list(pool.map(_regenerate_stripped, [(config, i) for i in ids], chunksize=16))
    else:
        examples = [_regenerate_stripped((config, i)) for i in ids]
    dataset = Dataset(config=config, examples=examples)

    if destination is not None:
        write_dataset(dataset, destination)
    return dataset

