"""Metrics arithmetic, fusion semantics, and published-score consistency."""

import numpy as np
import pytest

from pdmkit import ConfusionMatrix, confusion_matrix, fuse_predictions, precision_recall_f1
from pdmkit.errors import DegenerateLabels, InvalidConfig, LengthMismatch, UndefinedMetric


# --- published per-model scores reproduce from their own P/R pairs ----------------

REPORTED_SCORES = [
    # (precision, recall, expected F1 after rounding to 2 decimals)
    (0.84, 0.79, 0.81),  # failure classifier alone
    (0.88, 0.85, 0.86),  # sequence RUL model alone
    (0.82, 0.76, 0.79),  # forest baseline
    (0.91, 0.92, 0.91),  # fused pair
]


@pytest.mark.parametrize("precision,recall,f1", REPORTED_SCORES)
def test_reported_f1_recomputes_from_p_and_r(precision, recall, f1):
    got = 2.0 * precision * recall / (precision + recall)
    assert round(got, 2) == f1


# --- confusion matrix ---------------------------------------------------------


def test_confusion_matrix_counts():
    pred = [1, 1, -1, -1, 1, -1]
    act = [1, -1, -1, 1, 1, -1]
    cm = confusion_matrix(pred, act)
    assert (cm.tp, cm.fp, cm.tn, cm.fn) == (2, 1, 2, 1)
    assert cm.total == 6


def test_confusion_matrix_validation():
    with pytest.raises(DegenerateLabels):
        confusion_matrix([0, 1], [1, 1])
    with pytest.raises(LengthMismatch):
        confusion_matrix([1, 1], [1])
    with pytest.raises(InvalidConfig):
        ConfusionMatrix(tp=-1, fp=0, tn=0, fn=0)


# --- precision / recall / F1 ----------------------------------------------------


def test_scores_simple_case():
    scores = precision_recall_f1(ConfusionMatrix(tp=8, fp=2, tn=5, fn=2))
    assert scores.precision == 0.8
    assert scores.recall == 0.8
    assert abs(scores.f1 - 0.8) <= 1e-15
    assert scores.undefined == ()


def test_zero_denominators_are_absent_not_zero():
    scores = precision_recall_f1(ConfusionMatrix(tp=0, fp=0, tn=5, fn=0))
    assert scores.precision is None and scores.recall is None and scores.f1 is None
    assert set(scores.undefined) == {"precision", "recall", "f1"}

    no_preds = precision_recall_f1(ConfusionMatrix(tp=0, fp=0, tn=3, fn=2))
    assert no_preds.precision is None
    assert no_preds.recall == 0.0
    assert no_preds.f1 is None


def test_f1_undefined_when_p_plus_r_is_zero():
    scores = precision_recall_f1(ConfusionMatrix(tp=0, fp=3, tn=0, fn=2))
    assert scores.precision == 0.0 and scores.recall == 0.0
    assert scores.f1 is None and "f1" in scores.undefined


def test_strict_mode_raises():
    with pytest.raises(UndefinedMetric):
        precision_recall_f1(ConfusionMatrix(tp=0, fp=0, tn=5, fn=0), strict=True)


def test_f1_between_min_and_max_of_p_r():
    rng = np.random.default_rng(23)
    for _ in range(200):
        cm = ConfusionMatrix(tp=int(rng.integers(1, 50)), fp=int(rng.integers(0, 50)),
                             tn=int(rng.integers(0, 50)), fn=int(rng.integers(0, 50)))
        s = precision_recall_f1(cm)
        assert min(s.precision, s.recall) - 1e-12 <= s.f1 <= max(s.precision, s.recall) + 1e-12


# --- fusion ------------------------------------------------------------------------


def test_or_fusion_truth_table():
    tau = 100.0
    # (svm label, rul_hat, expected hybrid)
    cases = [(1, 50.0, 1), (1, 500.0, 1), (-1, 50.0, 1), (-1, 500.0, -1),
             (-1, 100.0, 1)]  # boundary: rul_hat == tau alerts
    for svm_label, rul_hat, want in cases:
        assert fuse_predictions(svm_label, rul_hat, tau, mode="or") == want


def test_and_fusion_truth_table():
    tau = 100.0
    cases = [(1, 50.0, 1), (1, 500.0, -1), (-1, 50.0, -1), (-1, 500.0, -1)]
    for svm_label, rul_hat, want in cases:
        assert fuse_predictions(svm_label, rul_hat, tau, mode="and") == want


def test_fusion_validation():
    with pytest.raises(InvalidConfig):
        fuse_predictions(1, 1.0, 1.0, mode="xor")
    with pytest.raises(DegenerateLabels):
        fuse_predictions(0, 1.0, 1.0)


def test_or_fusion_recall_dominates_components():
    rng = np.random.default_rng(77)
    for _ in range(100):
        n = 60
        actual = rng.choice([-1, 1], size=n)
        if np.all(actual == -1):
            actual[0] = 1
        svm_labels = rng.choice([-1, 1], size=n)
        rul_hats = rng.uniform(0.0, 200.0, size=n)
        tau = 100.0
        hybrid = np.array([fuse_predictions(int(s), float(r), tau)
                           for s, r in zip(svm_labels, rul_hats)])
        rul_labels = np.where(rul_hats <= tau, 1, -1)

        def recall(pred):
            cm = confusion_matrix(pred, actual)
            return precision_recall_f1(cm).recall

        assert recall(hybrid) >= recall(svm_labels)
        assert recall(hybrid) >= recall(rul_labels)
