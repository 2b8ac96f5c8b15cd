"""Scoring harness: accuracy, macro-F1, the three error rates
(test split, retained clients' data, erased client's data), the signed
deviation of each method's forget-set error from the retrain gold
standard, and wall-clock runtime accounting.

All rates are percentages. Predictions are argmax over logits with ties
broken toward the lowest class index. Macro-F1 averages per-class F1
over every class the model can emit; a class absent from both truth and
prediction contributes 0, so a collapsed predictor scores poorly.
"""

from __future__ import annotations

from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .dataforge import Dataset
from .errors import ConfigError, DimensionError, InputError, UsageError
from .numcore import MlpModel, forward

PCT_FIELDS = ("accuracy", "macro_f1", "error_t", "error_r", "error_f")


@dataclass(frozen=True)
class MetricsReport:
    """One method's scorecard.

    accuracy/macro_f1/error_t come from the test split, error_r from the
    union of retained clients' training data, error_f from the erased
    client's data; deviation_f is error_f minus the Retrained model's
    error_f on the same data, and runtime_s is the method's wall clock.
    """

    accuracy: float
    macro_f1: float
    error_t: float
    error_r: float
    error_f: float
    deviation_f: float
    runtime_s: float

    def __post_init__(self):
        for name in PCT_FIELDS:
            value = getattr(self, name)
            if not (np.isfinite(value) and 0.0 <= value <= 100.0):
                raise InputError(f"{name} must lie in [0, 100], got {value}")
        if abs(self.accuracy + self.error_t - 100.0) > 1e-9:
            raise InputError(
                f"accuracy and error_t must sum to 100, got {self.accuracy} and {self.error_t}"
            )
        if not (np.isfinite(self.deviation_f) and -100.0 <= self.deviation_f <= 100.0):
            raise InputError(f"deviation_f must lie in [-100, 100], got {self.deviation_f}")
        if not (np.isfinite(self.runtime_s) and self.runtime_s >= 0.0):
            raise InputError(f"runtime_s must be non-negative, got {self.runtime_s}")


def macro_f1(labels, predictions, class_count: int) -> float:
    """Unweighted mean of per-class F1 across all class_count classes,
    as a percentage.

    Uses F1 = 2*tp / (2*tp + fp + fn), which sends a class missing from
    both truth and prediction to 0 without a divide-by-zero special case.
    """
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if labels.ndim != 1 or labels.shape != predictions.shape:
        raise DimensionError(
            f"labels and predictions must be matching 1-D arrays, got "
            f"{labels.shape} and {predictions.shape}"
        )
    if labels.size == 0:
        raise InputError("macro_f1 requires at least one sample")
    if class_count < 1:
        raise InputError(f"class_count must be >= 1, got {class_count}")
    for name, arr in (("labels", labels), ("predictions", predictions)):
        if arr.min() < 0 or arr.max() >= class_count:
            raise InputError(
                f"{name} must lie in [0, {class_count}), got range [{arr.min()}, {arr.max()}]"
            )
    total = 0.0
    for k in range(class_count):
        tp = np.count_nonzero((predictions == k) & (labels == k))
        fp = np.count_nonzero((predictions == k) & (labels != k))
        fn = np.count_nonzero((predictions != k) & (labels == k))
        denom = 2 * tp + fp + fn
        if denom:
            total += 2.0 * tp / denom
    return 100.0 * total / class_count


def evaluate(model: MlpModel, dataset: Dataset) -> "tuple[float, float, float]":
    """Score the model on one dataset; returns (accuracy, macro_f1, error).

    error is exactly 100 - accuracy. Datasets are nonempty by
    construction, so no empty-input path exists here.
    """
    if dataset.d != model.arch.d_in:
        raise DimensionError(
            f"model expects {model.arch.d_in} features, dataset rows have {dataset.d}"
        )
    if dataset.class_count > model.arch.c_out:
        raise InputError(
            f"dataset spans {dataset.class_count} classes but the model emits {model.arch.c_out}"
        )
    x, y = dataset.arrays()
    _, logits = forward(model, x)
    predictions = np.argmax(logits, axis=1)
    accuracy = 100.0 * np.count_nonzero(predictions == y) / y.size
    return accuracy, macro_f1(y, predictions, model.arch.c_out), 100.0 - accuracy


def full_report(models, test, retain_data, forget_data, runtimes) -> "dict[str, MetricsReport]":
    """Score every method's snapshot on the three evaluation sets.

    models maps method name to ModelSnapshot and must contain exactly
    one snapshot with role Retrained: its forget-set error anchors
    deviation_f, so the gold row's own deviation is exactly 0.
    runtimes maps method name to wall-clock seconds.
    """
    gold = [name for name, snap in models.items() if snap.role == "Retrained"]
    if len(gold) != 1:
        raise ConfigError(
            f"full_report needs exactly one Retrained snapshot, found {len(gold)}"
        )
    missing = sorted(name for name in models if name not in runtimes)
    if missing:
        raise ConfigError(f"runtimes missing for methods: {', '.join(missing)}")
    scores = {}
    for name, snap in models.items():
        model = snap.model()
        accuracy, f1, error_t = evaluate(model, test)
        error_r = evaluate(model, retain_data)[2]
        error_f = evaluate(model, forget_data)[2]
        scores[name] = (accuracy, f1, error_t, error_r, error_f)
    gold_error_f = scores[gold[0]][4]
    return {
        name: MetricsReport(
            accuracy=accuracy,
            macro_f1=f1,
            error_t=error_t,
            error_r=error_r,
            error_f=error_f,
            deviation_f=error_f - gold_error_f,
            runtime_s=float(runtimes[name]),
        )
        for name, (accuracy, f1, error_t, error_r, error_f) in scores.items()
    }


class RuntimeClock:
    """Accumulating wall-clock span.

    Each `with` block adds its elapsed time to `seconds`, so one clock
    can bracket a phase that is split across several code regions while
    excluding everything in between.
    """

    def __init__(self):
        self.seconds = 0.0
        self._entered_at = None

    def __enter__(self) -> "RuntimeClock":
        if self._entered_at is not None:
            raise UsageError("RuntimeClock scopes cannot be nested on one instance")
        self._entered_at = perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        self.seconds += perf_counter() - self._entered_at
        self._entered_at = None
        return False
