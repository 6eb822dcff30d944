"""Evaluation metrics: accuracy, macro precision/F1, class-number MSE,
confusion matrix, and one-vs-rest ROC curves with trapezoidal AUC."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import LengthMismatch, SingleClassOnly
from ..model import NUM_CLASSES

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass
class EvalReport:
    accuracy: float
    macro_f1: float
    mse: float
    macro_precision: float
    confusion: np.ndarray  # (n_classes, n_classes), rows = truth, cols = prediction

    def table_row(self, model_name: str) -> str:
        return (
            f"{model_name},{self.accuracy:.4f},{self.macro_f1:.4f},"
            f"{self.mse:.4f},{self.macro_precision:.4f}"
        )


def evaluate(predictions: Sequence[int], truths: Sequence[int], n_classes: int = NUM_CLASSES) -> EvalReport:
    """Score predictions against truths.

    Macro precision/F1 average only over classes present in the truths; MSE
    is the mean squared difference of the numeric class labels.
    """
    preds = np.asarray(predictions, dtype=np.int64)
    trues = np.asarray(truths, dtype=np.int64)
    if len(preds) != len(trues) or len(preds) == 0:
        raise LengthMismatch(f"got {len(preds)} predictions vs {len(trues)} truths")

    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (trues, preds), 1)

    accuracy = float(np.trace(confusion)) / len(trues)
    mse = float(((preds - trues) ** 2).mean())

    precisions = []
    f1s = []
    for cls in range(n_classes):
        support = confusion[cls].sum()
        if support == 0:
            continue
        tp = confusion[cls, cls]
        predicted = confusion[:, cls].sum()
        precision = tp / predicted if predicted else 0.0
        recall = tp / support
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        precisions.append(precision)
        f1s.append(f1)
    return EvalReport(
        accuracy=accuracy,
        macro_f1=float(np.mean(f1s)),
        mse=mse,
        macro_precision=float(np.mean(precisions)),
        confusion=confusion,
    )


@dataclass
class RocCurve:
    """One-vs-rest ROC for one class: (FPR, TPR) points swept over score
    thresholds, anchored at (0,0) and (1,1)."""

    class_no: int
    thresholds: List[float]
    fpr: List[float]
    tpr: List[float]
    auc: float = field(init=False)

    def __post_init__(self) -> None:
        self.auc = float(_trapezoid(self.tpr, self.fpr))


def roc(scores: Sequence[float], truths: Sequence[int], class_no: int) -> RocCurve:
    """Threshold sweep over per-sample scores for `class_no` (one vs rest)."""
    s = np.asarray(scores, dtype=float)
    t = np.asarray(truths, dtype=np.int64)
    if len(s) != len(t) or len(s) == 0:
        raise LengthMismatch(f"got {len(s)} scores vs {len(t)} truths")
    positive = t == class_no
    n_pos = int(positive.sum())
    n_neg = len(t) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassOnly(f"class {class_no}: need both positives and negatives")

    order = np.argsort(-s, kind="stable")
    sorted_scores = s[order]
    sorted_pos = positive[order].astype(np.int64)
    tp = np.cumsum(sorted_pos)
    fp = np.cumsum(1 - sorted_pos)
    # A point per distinct threshold: the last index of each score value.
    distinct = np.flatnonzero(np.diff(sorted_scores)).tolist() + [len(s) - 1]

    thresholds = [float("inf")]
    fpr = [0.0]
    tpr = [0.0]
    for idx in distinct:
        thresholds.append(float(sorted_scores[idx]))
        fpr.append(float(fp[idx] / n_neg))
        tpr.append(float(tp[idx] / n_pos))
    return RocCurve(class_no=class_no, thresholds=thresholds, fpr=fpr, tpr=tpr)
