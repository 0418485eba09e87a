"""Bit error counts, accuracy tallies and confusion matrices.

All aggregates hold integer counts; rates are derived on demand so partial
results merge exactly in any order.
"""

from __future__ import annotations

import dataclasses
from typing import Any, Mapping, Sequence

import numpy as np
import numpy.typing as npt
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support

from .exceptions import InvalidMetricInputError


@dataclasses.dataclass(frozen=True, slots=True)
class BerCount:
    errors: int = 0
    bits: int = 0

    @property
    def rate(self) -> float:
        return self.errors / self.bits if self.bits else 0.0

    def __add__(self, other: "BerCount") -> "BerCount":
        return BerCount(self.errors + other.errors, self.bits + other.bits)


@dataclasses.dataclass(frozen=True, slots=True)
class Tally:
    correct: int = 0
    total: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def __add__(self, other: "Tally") -> "Tally":
        return Tally(self.correct + other.correct, self.total + other.total)


def ber(reference: npt.ArrayLike, decided: npt.ArrayLike) -> BerCount:
    """Count differing bits between two equally long bit sequences.

    Raises:
        InvalidMetricInputError: If the lengths differ.
    """

    ref = np.asarray(reference, dtype=np.uint8).reshape(-1)
    dec = np.asarray(decided, dtype=np.uint8).reshape(-1)
    if ref.size != dec.size:
        raise InvalidMetricInputError(f"Bit sequences differ in length: {ref.size} != {dec.size}")
    return BerCount(errors=int(np.count_nonzero(ref != dec)), bits=int(ref.size))


@dataclasses.dataclass(frozen=True, slots=True)
class ClassScore:
    label: str
    precision: float
    recall: float
    support: int


@dataclasses.dataclass(frozen=True, slots=True)
class ConfusionMatrix:
    """``counts[label][prediction]`` over ``K`` classes named by ``labels``."""

    counts: npt.NDArray[np.int64]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.labels)
        if counts.shape != (k, k):
            raise InvalidMetricInputError(f"Counts must be {k}x{k}, got {counts.shape}")
        if np.any(counts < 0):
            raise InvalidMetricInputError("Confusion counts must be non-negative")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "labels", tuple(str(label) for label in self.labels))

    @property
    def num_classes(self) -> int:
        return len(self.labels)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def tally(self) -> Tally:
        return Tally(self.correct, self.total)

    def support(self) -> npt.NDArray[np.int64]:
        return self.counts.sum(axis=1)

    def within_k(self, k: int) -> Tally:
        """Examples whose predicted class index is at most ``k`` away from the label."""

        index = np.arange(self.num_classes)
        near = np.abs(index[:, None] - index[None, :]) <= k
        return Tally(int(self.counts[near].sum()), self.total)

    def class_scores(self) -> list[ClassScore]:
        """Per-class precision and recall; classes never predicted or never seen score 0."""

        k = self.num_classes
        if self.total == 0:
            return [ClassScore(label, 0.0, 0.0, 0) for label in self.labels]
        rows, cols = np.nonzero(self.counts)
        weights = self.counts[rows, cols]
        y_true = np.repeat(rows, weights)
        y_pred = np.repeat(cols, weights)
        precision, recall, _, support = precision_recall_fscore_support(
            y_true, y_pred, labels=np.arange(k), zero_division=0
        )
        return [
            ClassScore(self.labels[i], float(precision[i]), float(recall[i]), int(support[i])) for i in range(k)
        ]

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.labels != other.labels:
            raise InvalidMetricInputError("Cannot merge confusion matrices with different labels")
        return ConfusionMatrix(self.counts + other.counts, self.labels)

    def to_dict(self) -> dict[str, Any]:
        return {"labels": list(self.labels), "counts": self.counts.tolist()}

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "ConfusionMatrix":
        return cls(np.asarray(payload["counts"], dtype=np.int64), tuple(payload["labels"]))

    @classmethod
    def empty(cls, labels: Sequence[object]) -> "ConfusionMatrix":
        return cls(np.zeros((len(labels), len(labels)), dtype=np.int64), tuple(str(label) for label in labels))


def confusion(
    predictions: npt.ArrayLike,
    labels: npt.ArrayLike,
    num_classes: int,
    *,
    class_labels: Sequence[object] | None = None,
) -> ConfusionMatrix:
    """Build a confusion matrix from class indices.

    Raises:
        InvalidMetricInputError: On length mismatch or indices outside ``[0, num_classes)``.
    """

    preds = np.asarray(predictions, dtype=np.int64).reshape(-1)
    truth = np.asarray(labels, dtype=np.int64).reshape(-1)
    if preds.size != truth.size:
        raise InvalidMetricInputError(f"Got {preds.size} predictions for {truth.size} labels")
    for name, values in (("prediction", preds), ("label", truth)):
        if values.size and (values.min() < 0 or values.max() >= num_classes):
            raise InvalidMetricInputError(f"Every {name} must lie in [0, {num_classes})")
    names = tuple(class_labels) if class_labels is not None else tuple(range(num_classes))
    if len(names) != num_classes:
        raise InvalidMetricInputError(f"Expected {num_classes} class labels, got {len(names)}")
    if truth.size == 0:
        return ConfusionMatrix.empty(names)
    counts = confusion_matrix(truth, preds, labels=np.arange(num_classes))
    return ConfusionMatrix(counts, tuple(str(name) for name in names))


def within_k_accuracy(matrix: ConfusionMatrix, k: int) -> float:
    """Fraction of examples predicted at most ``k`` classes away from their label."""

    if k < 0:
        raise InvalidMetricInputError("k must be non-negative")
    return matrix.within_k(k).accuracy
