from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from sicunet.models import CnnClassifier, CnnClassifierSpec, UNet, UnetSpec
from sicunet.nn import (
    AdamState,
    BatchNorm1d,
    BatchNormState,
    CheckpointError,
    CheckpointVersionError,
    Conv1d,
    Dense,
    Flatten,
    InvalidTensorError,
    MaxPool1d,
    MissingContextError,
    Module,
    ReLU,
    Sequential,
    TrainConfig,
    Upsample1d,
    adam_step,
    batchnorm1d_forward,
    build_module,
    conv1d_backward,
    conv1d_forward,
    decode_checkpoint,
    encode_checkpoint,
    gradient_check,
    load_checkpoint,
    mse_loss,
    predict,
    save_checkpoint,
    softmax_cross_entropy,
    train_epochs,
)


def _rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


GRADIENT_CASES: dict[str, tuple[Module, tuple[int, ...]]] = {
    "conv_same": (Conv1d(3, 4, 3, rng=_rng(1)), (2, 3, 9)),
    "conv_strided": (Conv1d(2, 3, 4, stride=2, padding=1, rng=_rng(2)), (2, 2, 11)),
    "dense": (Dense(5, 3, rng=_rng(3)), (4, 5)),
    "batchnorm_3d": (BatchNorm1d(3), (4, 3, 6)),
    "batchnorm_2d": (BatchNorm1d(3), (5, 3)),
    "relu": (ReLU(), (2, 3, 7)),
    "maxpool": (MaxPool1d(2), (2, 3, 9)),
    "upsample": (Upsample1d(2), (2, 3, 5)),
    "flatten_dense": (Sequential([Flatten(), Dense(12, 2, rng=_rng(4))]), (3, 3, 4)),
    "conv_stack": (
        Sequential(
            [
                Conv1d(2, 3, 3, rng=_rng(5)),
                BatchNorm1d(3),
                ReLU(),
                MaxPool1d(2),
                Flatten(),
                Dense(12, 2, rng=_rng(6)),
            ]
        ),
        (3, 2, 8),
    ),
    "unet": (UNet(UnetSpec(depth=2, base_channels=2, kernel_size=3), seed=7), (2, 2, 9)),
    "classifier": (
        CnnClassifier(
            CnnClassifierSpec(num_classes=3, input_length=16, conv_blocks=((2, 3, 2), (2, 3, 2)), hidden_width=4),
            seed=8,
        ),
        (3, 2, 16),
    ),
}


@pytest.mark.parametrize("case", sorted(GRADIENT_CASES))
def test_analytic_gradients_match_finite_differences(case: str) -> None:
    module, shape = GRADIENT_CASES[case]
    x = _rng(11).standard_normal(shape)

    result = gradient_check(module, x)

    assert result.passed(1e-4), f"{case}: max error {result.max_error:.3e}"
    assert set(result.parameter_errors) == {name for name, _ in module.named_parameters()}


@pytest.mark.parametrize(("stride", "padding"), [(1, 0), (1, 2), (2, 1)])
def test_conv_matches_nested_loops(stride: int, padding: int) -> None:
    rng = np.random.default_rng(stride * 10 + padding)
    x = rng.standard_normal((2, 3, 7))
    kernels = rng.standard_normal((4, 3, 3))
    bias = rng.standard_normal(4)

    out, _ = conv1d_forward(x, kernels, bias, stride=stride, padding=padding)

    padded = np.pad(x, ((0, 0), (0, 0), (padding, padding)))
    length = (7 + 2 * padding - 3) // stride + 1
    expected = np.zeros((2, 4, length))
    for b in range(2):
        for o in range(4):
            for t in range(length):
                start = t * stride
                expected[b, o, t] = bias[o] + sum(
                    padded[b, c, start + j] * kernels[o, c, j] for c in range(3) for j in range(3)
                )
    assert np.max(np.abs(out - expected)) < 1e-12


def test_conv_output_length() -> None:
    layer = Conv1d(2, 3, 4, stride=2, padding=1)
    out = layer.forward(np.zeros((1, 2, 11)))

    assert out.shape == (1, 3, (11 + 2 - 4) // 2 + 1)


def test_backward_without_forward_raises() -> None:
    layer = Dense(3, 2)
    with pytest.raises(MissingContextError):
        layer.backward(np.ones((1, 2)))

    layer.set_mode("infer")
    layer.forward(np.ones((1, 3)))
    with pytest.raises(MissingContextError):
        layer.backward(np.ones((1, 2)))

    with pytest.raises(MissingContextError):
        conv1d_backward(np.ones((1, 1, 1)), None)


def test_batchnorm_train_mode_needs_two_examples() -> None:
    with pytest.raises(InvalidTensorError):
        BatchNorm1d(2).forward(np.ones((1, 2, 4)))


def test_batchnorm_running_statistics() -> None:
    layer = BatchNorm1d(2, momentum=0.5)
    x = _rng().normal(3.0, 2.0, size=(8, 2, 16))

    out = layer.forward(x)
    np.testing.assert_allclose(out.mean(axis=(0, 2)), 0.0, atol=1e-12)
    np.testing.assert_allclose(layer.state.running_mean, 0.5 * x.mean(axis=(0, 2)))

    layer.set_mode("infer")
    single = layer.forward(x[:1])
    expected = (x[:1] - layer.state.running_mean[None, :, None]) / np.sqrt(
        layer.state.running_var[None, :, None] + layer.state.eps
    )
    np.testing.assert_allclose(single, expected)


def test_batchnorm_constant_channel_normalises_to_zero() -> None:
    state = BatchNormState.create(2)
    x = np.stack([np.full((4, 8), 3.5), _rng().normal(size=(4, 8))], axis=1)

    out, _ = batchnorm1d_forward(x, state)

    np.testing.assert_array_equal(out[:, 0, :], 0.0)
    assert np.all(np.isfinite(out))


def test_batchnorm_infer_mode_with_unit_statistics_only_scales_by_eps() -> None:
    state = BatchNormState.create(3, mode="infer")
    x = _rng(1).normal(size=(2, 3, 5))

    out, context = batchnorm1d_forward(x, state)

    assert context is None
    np.testing.assert_allclose(out, x / math.sqrt(1.0 + state.eps), rtol=0, atol=1e-12)


@pytest.mark.parametrize("classes", [2, 3, 21])
def test_cross_entropy_of_uniform_logits_is_log_k(classes: int) -> None:
    labels = np.arange(4) % classes
    loss, grad = softmax_cross_entropy(np.zeros((4, classes)), labels)

    assert loss == pytest.approx(math.log(classes), abs=1e-12)
    expected = np.full((4, classes), 1.0 / classes)
    expected[np.arange(4), labels] -= 1.0
    np.testing.assert_allclose(grad, expected / 4, atol=1e-15)


def test_cross_entropy_is_stable_for_large_logits() -> None:
    loss, grad = softmax_cross_entropy(np.array([[1000.0, 0.0]]), [0])

    assert loss == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.isfinite(grad))


def test_cross_entropy_rejects_bad_labels() -> None:
    with pytest.raises(InvalidTensorError):
        softmax_cross_entropy(np.zeros((2, 3)), [0, 3])
    with pytest.raises(InvalidTensorError):
        softmax_cross_entropy(np.zeros((2, 3)), [0])


def test_mse_loss_and_gradient() -> None:
    prediction = np.array([[1.0, 2.0], [3.0, 4.0]])
    target = np.array([[1.0, 0.0], [3.0, 5.0]])

    loss, grad = mse_loss(prediction, target)

    assert loss == pytest.approx(5.0 / 4.0)
    np.testing.assert_allclose(grad, 2.0 / 4.0 * (prediction - target))
    with pytest.raises(InvalidTensorError):
        mse_loss(prediction, target[:1])


def test_adam_matches_scalar_reference() -> None:
    param = np.array([1.0])
    gradients = [0.5, -0.25, 0.75, 0.1]
    state = AdamState(lr=0.01)

    reference, m, v = 1.0, 0.0, 0.0
    for t, g in enumerate(gradients, start=1):
        adam_step({"p": param}, {"p": np.array([g])}, state)
        m = 0.9 * m + 0.1 * g
        v = 0.999 * v + 0.001 * g * g
        m_hat = m / (1 - 0.9**t)
        v_hat = v / (1 - 0.999**t)
        reference -= 0.01 * m_hat / (math.sqrt(v_hat) + 1e-8)
        assert param[0] == pytest.approx(reference, abs=1e-12)
    assert state.t == len(gradients)


@pytest.mark.parametrize(("lr", "gradient"), [(0.0, 0.7), (0.01, 0.0)])
def test_adam_leaves_parameters_alone_without_a_step(lr: float, gradient: float) -> None:
    param = np.array([1.25, -0.5])
    before = param.copy()
    state = AdamState(lr=lr)

    for _ in range(5):
        adam_step({"p": param}, {"p": np.full(2, gradient)}, state)

    np.testing.assert_array_equal(param, before)


def test_adam_descends_a_parabola_like_the_scalar_reference() -> None:
    param = np.array([1.0])
    state = AdamState(lr=0.05)

    reference, m, v = 1.0, 0.0, 0.0
    for t in range(1, 101):
        adam_step({"x": param}, {"x": 2.0 * param.copy()}, state)
        g = 2.0 * reference
        m = 0.9 * m + 0.1 * g
        v = 0.999 * v + 0.001 * g * g
        reference -= 0.05 * (m / (1 - 0.9**t)) / (math.sqrt(v / (1 - 0.999**t)) + 1e-8)
    assert param[0] == pytest.approx(reference, abs=1e-12)
    assert abs(param[0]) < 1.0


def test_adam_rejects_mismatched_names() -> None:
    with pytest.raises(InvalidTensorError):
        adam_step({"a": np.zeros(2)}, {"b": np.zeros(2)}, AdamState())


def _blobs(n: int = 200) -> tuple[np.ndarray, np.ndarray]:
    rng = _rng(3)
    labels = np.arange(n) % 2
    centres = np.where(labels[:, None] == 1, 2.0, -2.0)
    return centres + rng.normal(0.0, 0.5, size=(n, 2)), labels


def _toy_model(seed: int) -> Sequential:
    rng = _rng(seed)
    return Sequential([Dense(2, 8, rng=rng), ReLU(), Dense(8, 2, rng=rng)])


def test_training_separates_toy_classes() -> None:
    inputs, labels = _blobs()
    epochs: list[int] = []
    model = _toy_model(0)

    result = train_epochs(
        model,
        inputs,
        labels,
        TrainConfig(epochs=30, batch_size=16, lr=0.05, dtype="float64"),
        on_epoch=lambda epoch, loss, accuracy: epochs.append(epoch),
    )

    assert epochs == list(range(1, 31))
    assert result.final_loss < result.loss_history[0]
    assert result.final_accuracy is not None and result.final_accuracy >= 0.98
    assert model.mode == "infer"
    assert result.to_dict()["config"]["epochs"] == 30


def test_training_is_reproducible() -> None:
    inputs, labels = _blobs(64)
    config = TrainConfig(epochs=3, batch_size=8, lr=0.01, seed=5)

    first, second = _toy_model(1), _toy_model(1)
    train_epochs(first, inputs, labels, config)
    train_epochs(second, inputs, labels, config)

    for (name, a), (_, b) in zip(first.named_parameters(), second.named_parameters()):
        np.testing.assert_array_equal(a, b, err_msg=name)


def test_mse_training_reduces_loss() -> None:
    rng = _rng(9)
    inputs = rng.standard_normal((32, 3))
    targets = inputs @ rng.standard_normal((3, 2))
    model = Sequential([Dense(3, 2, rng=rng)])

    result = train_epochs(model, inputs, targets, TrainConfig(epochs=20, batch_size=8, lr=0.05), loss="mse")

    assert result.final_loss < 0.5 * result.loss_history[0]
    assert result.accuracy_history == []


def test_training_rejects_bad_inputs() -> None:
    model = _toy_model(0)
    with pytest.raises(InvalidTensorError):
        train_epochs(model, np.zeros((0, 2)), [], TrainConfig())
    with pytest.raises(InvalidTensorError):
        train_epochs(model, np.zeros((4, 2)), [0, 1], TrainConfig())
    with pytest.raises(InvalidTensorError):
        train_epochs(model, np.full((4, 2), np.nan), [0, 1, 0, 1], TrainConfig())


@pytest.mark.parametrize(
    "changes",
    [{"epochs": 0}, {"batch_size": 0}, {"lr": -1.0}, {"lr": float("nan")}, {"dtype": "int32"}],
)
def test_train_config_validation(changes: dict) -> None:
    with pytest.raises(InvalidTensorError):
        TrainConfig(**changes)


def test_predict_restores_mode() -> None:
    model = _toy_model(0)
    out = predict(model, np.zeros((5, 2)), batch_size=2)

    assert out.shape == (5, 2)
    assert model.mode == "train"


def _trained_stack() -> Sequential:
    rng = _rng(2)
    model = Sequential(
        [Conv1d(2, 3, 3, rng=rng), BatchNorm1d(3), ReLU(), MaxPool1d(2), Flatten(), Dense(12, 2, rng=rng)]
    )
    inputs = rng.standard_normal((16, 2, 8))
    train_epochs(model, inputs, np.arange(16) % 2, TrainConfig(epochs=2, batch_size=4))
    return model


def test_checkpoint_round_trip(tmp_path: Path) -> None:
    model = _trained_stack()
    path = save_checkpoint(model, tmp_path / "model.sicw", {"stage": "toy"})

    checkpoint = load_checkpoint(path)

    assert checkpoint.metadata == {"stage": "toy"}
    assert checkpoint.architecture == model.describe()
    assert checkpoint.model.mode == "infer"
    for (name, original), (_, restored) in zip(model.state_dict().items(), checkpoint.model.state_dict().items()):
        np.testing.assert_array_equal(original, restored, err_msg=name)
    x = _rng(5).standard_normal((3, 2, 8)).astype(np.float32)
    np.testing.assert_array_equal(predict(model, x), predict(checkpoint.model, x))


def test_corrupted_checkpoint_is_rejected() -> None:
    data = bytearray(encode_checkpoint(_trained_stack()))
    data[-40] ^= 0x10

    with pytest.raises(CheckpointError, match="checksum"):
        decode_checkpoint(bytes(data))


def test_checkpoint_version_and_magic() -> None:
    data = bytearray(encode_checkpoint(_trained_stack()))
    future = bytearray(data)
    future[4:8] = (7).to_bytes(4, "little")
    with pytest.raises(CheckpointVersionError):
        decode_checkpoint(bytes(future))

    foreign = b"SICU" + bytes(data[4:])
    with pytest.raises(CheckpointError):
        decode_checkpoint(foreign)
    with pytest.raises(CheckpointError):
        decode_checkpoint(bytes(data[:10]))


def test_missing_checkpoint_file(tmp_path: Path) -> None:
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "absent.sicw")


def test_unjsonable_metadata_is_rejected() -> None:
    with pytest.raises(CheckpointError):
        encode_checkpoint(Dense(2, 2), {"bad": float("nan")})


def test_build_module_and_state_dict_validation() -> None:
    with pytest.raises(InvalidTensorError):
        build_module({"type": "transformer"})

    layer = Dense(3, 2)
    clone = build_module(layer.describe())
    clone.load_state_dict(layer.state_dict())
    np.testing.assert_array_equal(clone.state_dict()["weight"], layer.weight)
    with pytest.raises(InvalidTensorError):
        clone.load_state_dict({"weight": np.zeros((2, 2)), "bias": np.zeros(2)})
    with pytest.raises(InvalidTensorError):
        clone.load_state_dict({"weight": np.zeros((2, 3))})
    assert layer.parameter_count() == 8
