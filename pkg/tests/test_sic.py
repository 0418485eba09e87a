from __future__ import annotations

import math

import numpy as np
import pytest

from sicunet.dsp import (
    IqFrame,
    contained_symbol_count,
    demodulate_contained,
    design_rrc,
    first_contained_symbol,
    generated_symbol_count,
    measure_power,
    mix_at_sir,
    overlapping_symbol_count,
    qpsk_modulate,
    shape_and_crop,
    trailing_edge_symbol_count,
)
from sicunet.evaluation import BerCount, ber
from sicunet.scenario import ScenarioConfig, regenerate_example
from sicunet.sic import InvalidSicInputError, SicConfig, reconstruct_interferer, scale_for_cancellation, sic_cancel

FRAME_LEN = 2048


def _soi(rng: np.random.Generator, frame_len: int = FRAME_LEN) -> tuple[IqFrame, np.ndarray]:
    shape = design_rrc(sps=16)
    bits = rng.integers(0, 2, size=2 * generated_symbol_count(frame_len, shape), dtype=np.uint8)
    frame = shape_and_crop(qpsk_modulate(bits), shape, frame_len)
    first = first_contained_symbol(shape)
    count = contained_symbol_count(frame_len, shape)
    return frame.scaled(1.0 / math.sqrt(measure_power(frame))), bits[2 * first : 2 * (first + count)]


def _edge_to_edge_interferer(
    sps: int, rng: np.random.Generator, frame_len: int = FRAME_LEN
) -> tuple[IqFrame, np.ndarray]:
    shape = design_rrc(sps=sps)
    bits = rng.integers(0, 2, size=2 * overlapping_symbol_count(frame_len, shape), dtype=np.uint8)
    return shape_and_crop(qpsk_modulate(bits), shape, frame_len), bits


def test_scale_for_cancellation_splits_mixture_power() -> None:
    # P_soi / P_int = 10 and P_soi + P_int = 11
    assert scale_for_cancellation(11.0, 10.0) == pytest.approx(1.0)
    assert scale_for_cancellation(11.0, -10.0) == pytest.approx(math.sqrt(10.0))
    assert scale_for_cancellation(8.0, 0.0, reconstruction_power=4.0) == pytest.approx(1.0)
    with pytest.raises(InvalidSicInputError):
        scale_for_cancellation(0.0, 0.0)
    with pytest.raises(InvalidSicInputError):
        scale_for_cancellation(1.0, float("nan"))


@pytest.mark.parametrize("sps", [32, 16, 4])
@pytest.mark.parametrize("sir_db", [-10.0, -4.0])
def test_exact_cancellation_with_true_interferer_bits(sps: int, sir_db: float) -> None:
    rng = np.random.default_rng(sps)
    soi, soi_bits = _soi(rng)
    interferer, interferer_bits = _edge_to_edge_interferer(sps, rng)
    mixture = mix_at_sir(soi, interferer, sir_db)
    config = SicConfig(
        interferer_sps=sps, sir_est_db=sir_db, power_reference="soi", soi_power=1.0, exclude_edge_symbols=False
    )

    result = sic_cancel(mixture, config, forced_interferer_bits=interferer_bits)

    assert result.order == "interferer"
    np.testing.assert_allclose(result.residual.samples, soi.samples, atol=1e-9)
    np.testing.assert_array_equal(result.soi_bits, soi_bits)
    np.testing.assert_array_equal(result.interferer_bits_est, interferer_bits)


@pytest.mark.parametrize("sps", [32, 16, 4])
def test_trailing_edge_symbols_stay_in_the_residual(sps: int) -> None:
    rng = np.random.default_rng(10 + sps)
    soi, _ = _soi(rng)
    interferer, interferer_bits = _edge_to_edge_interferer(sps, rng)
    mixture = mix_at_sir(soi, interferer, -10.0)
    shape = design_rrc(sps=sps)
    config = SicConfig(interferer_sps=sps, sir_est_db=-10.0, power_reference="soi", soi_power=1.0)

    result = sic_cancel(mixture, config, forced_interferer_bits=interferer_bits)

    dropped = trailing_edge_symbol_count(FRAME_LEN, shape)
    assert dropped == shape.span_symbols // 2
    cut = (overlapping_symbol_count(FRAME_LEN, shape) - dropped) * sps - shape.delay
    np.testing.assert_allclose(result.residual.samples[:cut], soi.samples[:cut], atol=1e-9)
    assert np.max(np.abs(result.residual.samples[cut:] - soi.samples[cut:])) > 1e-3
    np.testing.assert_array_equal(result.interferer_bits_est, interferer_bits)


def test_reconstruction_drops_symbols_without_rescaling() -> None:
    shape = design_rrc(sps=16)
    rng = np.random.default_rng(4)
    bits = rng.integers(0, 2, size=2 * overlapping_symbol_count(FRAME_LEN, shape), dtype=np.uint8)

    full = reconstruct_interferer(bits, shape, FRAME_LEN)
    trimmed = reconstruct_interferer(bits, shape, FRAME_LEN, dropped_trailing_symbols=4)

    cut = (overlapping_symbol_count(FRAME_LEN, shape) - 4) * 16 - shape.delay
    np.testing.assert_allclose(trimmed.samples[:cut], full.samples[:cut], atol=1e-12)
    assert measure_power(trimmed) < measure_power(full) == pytest.approx(1.0)


@pytest.mark.parametrize("sps", [32, 16, 4])
def test_perfect_knowledge_cancellation_over_central_frame(sps: int) -> None:
    frame_len = 8073
    rng = np.random.default_rng(20 + sps)
    soi, _ = _soi(rng, frame_len)
    interferer, interferer_bits = _edge_to_edge_interferer(sps, rng, frame_len)
    mixture = mix_at_sir(soi, interferer, -10.0)
    config = SicConfig(interferer_sps=sps, sir_est_db=-10.0, power_reference="soi", soi_power=1.0)

    result = sic_cancel(mixture, config, forced_interferer_bits=interferer_bits)

    margin = frame_len // 20
    central = slice(margin, frame_len - margin)
    leftover = IqFrame(result.residual.samples[central] - soi.samples[central])
    assert measure_power(leftover) < 1e-6 * measure_power(IqFrame(mixture.samples - soi.samples))


def test_overestimated_sir_does_not_improve_cancellation() -> None:
    config = ScenarioConfig(
        frame_len=FRAME_LEN, interferer_sps_set=(32, 16), sir_bins_db=(-10,), examples_per_bin=3, seed=12
    )
    oracle_total = shifted_total = BerCount()
    oracle_leak = shifted_leak = 0.0
    for example_id in range(config.example_count):
        example = regenerate_example(config, example_id)
        sps = config.sps_for_class(example.sps_class)
        base = SicConfig(interferer_sps=sps, frame_len=FRAME_LEN)
        oracle = sic_cancel(example.mixture, base.with_estimates(sps, example.true_sir_db))
        shifted = sic_cancel(example.mixture, base.with_estimates(sps, example.true_sir_db + 1.0))
        oracle_total = oracle_total + ber(example.soi_bits, oracle.soi_bits)
        shifted_total = shifted_total + ber(example.soi_bits, shifted.soi_bits)
        oracle_leak += measure_power(IqFrame(oracle.residual.samples - example.soi.samples))
        shifted_leak += measure_power(IqFrame(shifted.residual.samples - example.soi.samples))

    assert shifted_total.errors >= oracle_total.errors
    assert shifted_leak > oracle_leak



def test_strong_soi_is_demodulated_directly() -> None:
    rng = np.random.default_rng(1)
    soi, soi_bits = _soi(rng)
    interferer, _ = _edge_to_edge_interferer(4, rng)
    mixture = mix_at_sir(soi, interferer, 10.0)

    result = sic_cancel(mixture, SicConfig(interferer_sps=4, sir_est_db=10.0))

    assert result.order == "none"
    assert result.residual is mixture
    assert result.interferer_bits_est.size == 0
    assert ber(soi_bits, result.soi_bits).errors == 0


def test_cancel_when_soi_stronger_forces_cancellation() -> None:
    rng = np.random.default_rng(2)
    soi, _ = _soi(rng)
    interferer, _ = _edge_to_edge_interferer(16, rng)
    mixture = mix_at_sir(soi, interferer, 5.0)

    result = sic_cancel(mixture, SicConfig(sir_est_db=5.0, cancel_when_soi_stronger=True))

    assert result.order == "interferer"
    assert result.interferer_bits_est.size == 2 * overlapping_symbol_count(FRAME_LEN, design_rrc(sps=16))


def test_sic_beats_direct_demodulation_under_strong_interference() -> None:
    config = ScenarioConfig(frame_len=FRAME_LEN, interferer_sps_set=(4,), sir_bins_db=(-10,), examples_per_bin=4, seed=3)
    sic_total = direct_total = BerCount()
    for example_id in range(config.example_count):
        example = regenerate_example(config, example_id)
        cancelled = sic_cancel(example.mixture, SicConfig(interferer_sps=4, sir_est_db=-10.0, frame_len=FRAME_LEN))
        direct = demodulate_contained(example.mixture, config.soi_shape())
        sic_total = sic_total + ber(example.soi_bits, cancelled.soi_bits)
        direct_total = direct_total + ber(example.soi_bits, direct)

    assert sic_total.rate <= 0.02
    assert sic_total.rate < direct_total.rate
    assert direct_total.rate > 0.1


def test_reconstruction_has_unit_power() -> None:
    shape = design_rrc(sps=4)
    bits = np.zeros(2 * overlapping_symbol_count(FRAME_LEN, shape), dtype=np.uint8)

    frame = reconstruct_interferer(bits, shape, FRAME_LEN)

    assert len(frame) == FRAME_LEN
    assert measure_power(frame) == pytest.approx(1.0)


def test_sic_input_validation() -> None:
    mixture = IqFrame(np.ones(FRAME_LEN, dtype=np.complex128), sps=16)
    with pytest.raises(InvalidSicInputError):
        SicConfig(interferer_sps=8)
    with pytest.raises(InvalidSicInputError):
        SicConfig(max_passes=2)
    with pytest.raises(InvalidSicInputError):
        SicConfig(power_reference="noise")  # type: ignore[arg-type]
    with pytest.raises(InvalidSicInputError):
        sic_cancel(mixture, SicConfig(frame_len=1024))
    with pytest.raises(InvalidSicInputError):
        sic_cancel(IqFrame(mixture.samples, sps=4), SicConfig())
    with pytest.raises(InvalidSicInputError):
        sic_cancel(mixture, SicConfig(sir_est_db=-3.0), forced_interferer_bits=[0, 1])


def test_config_round_trip_and_estimates() -> None:
    config = SicConfig(frame_len=FRAME_LEN).with_estimates(4, -7)

    assert config.interferer_sps == 4
    assert config.sir_est_db == -7.0
    assert SicConfig.from_dict(config.to_dict()) == config
    assert config.soi_shape.sps == 16
    assert config.interferer_shape.sps == 4
