"""Classifier evaluation and SVM/LSTM fusion.

Fusing is done at the label level: the hybrid flags a window when the SVM
says failure OR the predicted RUL has dropped to the alert threshold. That
trades precision for recall, which is the behavior the hybrid exists for;
AND-fusion is available behind a flag. Metrics with zero denominators are
reported absent rather than silently zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLabels, InvalidConfig, LengthMismatch, UndefinedMetric
from .rul import LstmModel, RulLinearModel, lstm_forward, rul_predict_linear
from .svm import SvmModel, svm_decision

FUSION_MODES = ("or", "and")
MODEL_ORDER = ("svm", "lstm", "rul_linear", "hybrid")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise InvalidConfig("confusion counts must be >= 0")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricScores:
    """Precision/recall/F1; a metric is None when its denominator is zero."""

    precision: float | None
    recall: float | None
    f1: float | None
    undefined: tuple[str, ...] = ()


@dataclass
class MetricsReport:
    """Per-model confusion matrices and scores, keyed by model name."""

    entries: dict[str, tuple[ConfusionMatrix, MetricScores]]

    def to_json_dict(self) -> dict:
        doc = {}
        for name, (cm, scores) in self.entries.items():
            doc[name] = {
                "confusion": {"tp": cm.tp, "fp": cm.fp, "tn": cm.tn, "fn": cm.fn},
                "precision": scores.precision,
                "recall": scores.recall,
                "f1": scores.f1,
                "undefined": list(scores.undefined),
            }
        return doc


def _check_labels(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise LengthMismatch(f"{name} must be 1-D")
    if not np.all(np.isin(arr, (-1, 1))):
        raise DegenerateLabels(f"{name} must contain only -1/+1")
    return arr.astype(np.int64)


def confusion_matrix(predicted, actual) -> ConfusionMatrix:
    """Count tp/fp/tn/fn over paired -1/+1 labels."""
    pred = _check_labels(predicted, "predicted")
    act = _check_labels(actual, "actual")
    if pred.shape != act.shape:
        raise LengthMismatch(f"{pred.shape[0]} predictions vs {act.shape[0]} labels")
    return ConfusionMatrix(
        tp=int(np.sum((pred == 1) & (act == 1))),
        fp=int(np.sum((pred == 1) & (act == -1))),
        tn=int(np.sum((pred == -1) & (act == -1))),
        fn=int(np.sum((pred == -1) & (act == 1))),
    )


def precision_recall_f1(cm: ConfusionMatrix, strict: bool = False) -> MetricScores:
    """P = tp/(tp+fp), R = tp/(tp+fn), F1 = 2PR/(P+R).

    Zero denominators leave the metric absent (None) and flag it in
    ``undefined``; with ``strict`` they raise UndefinedMetric instead.
    """
    undefined = []
    precision = recall = f1 = None
    if cm.tp + cm.fp > 0:
        precision = cm.tp / (cm.tp + cm.fp)
    else:
        undefined.append("precision")
    if cm.tp + cm.fn > 0:
        recall = cm.tp / (cm.tp + cm.fn)
    else:
        undefined.append("recall")
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        undefined.append("f1")
    if strict and undefined:
        raise UndefinedMetric(f"undefined metrics: {', '.join(undefined)}")
    return MetricScores(precision=precision, recall=recall, f1=f1, undefined=tuple(undefined))


def fuse_predictions(svm_label: int, rul_hat_ms: float, tau_ms: float, mode: str = "or") -> int:
    """Hybrid label from the SVM class and the RUL estimate vs. threshold tau."""
    if mode not in FUSION_MODES:
        raise InvalidConfig(f"fusion mode must be one of {FUSION_MODES}, got {mode!r}")
    if svm_label not in (-1, 1):
        raise DegenerateLabels(f"svm_label must be -1 or +1, got {svm_label!r}")
    rul_says_failure = rul_hat_ms <= tau_ms
    svm_says_failure = svm_label == 1
    if mode == "or":
        return 1 if (svm_says_failure or rul_says_failure) else -1
    return 1 if (svm_says_failure and rul_says_failure) else -1


def evaluate_models(features: np.ndarray, histories: list[np.ndarray], labels,
                    svm_model: SvmModel, lstm_model: LstmModel,
                    rul_model: RulLinearModel, tau_ms: float,
                    fusion: str = "or") -> MetricsReport:
    """Score all four models on the same labeled windows.

    The RUL estimators classify through the alert rule rul_hat <= tau; the
    hybrid fuses the SVM label with the LSTM's RUL estimate.
    """
    act = _check_labels(labels, "labels")
    x = np.asarray(features, dtype=np.float64)
    if x.shape[0] != act.shape[0] or len(histories) != act.shape[0]:
        raise LengthMismatch("features, histories and labels must align")

    svm_labels = np.fromiter((svm_decision(svm_model, row) for row in x),
                             dtype=np.int64, count=x.shape[0])
    lstm_rul = np.asarray([lstm_forward(lstm_model, hist)[0] for hist in histories])
    linear_rul = np.asarray([rul_predict_linear(rul_model, row) for row in x])

    lstm_labels = np.where(lstm_rul <= tau_ms, 1, -1)
    linear_labels = np.where(linear_rul <= tau_ms, 1, -1)
    hybrid_labels = np.asarray(
        [fuse_predictions(int(s), float(r), tau_ms, mode=fusion)
         for s, r in zip(svm_labels, lstm_rul)], dtype=np.int64)

    entries = {}
    for name, pred in (("svm", svm_labels), ("lstm", lstm_labels),
                       ("rul_linear", linear_labels), ("hybrid", hybrid_labels)):
        cm = confusion_matrix(pred, act)
        entries[name] = (cm, precision_recall_f1(cm))
    return MetricsReport(entries=entries)
