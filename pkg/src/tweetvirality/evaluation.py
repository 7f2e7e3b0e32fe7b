"""Macro-averaged evaluation metrics and the documented target results."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

NUM_CLASSES = 4


def confusion_matrix(
    y_true: Sequence[int], y_pred: Sequence[int], num_classes: int = NUM_CLASSES
) -> np.ndarray:
    """Counts with true classes on rows and predicted classes on columns."""
    true_arr = np.asarray(y_true, dtype=np.int64)
    pred_arr = np.asarray(y_pred, dtype=np.int64)
    if true_arr.shape != pred_arr.shape or true_arr.ndim != 1:
        raise ValueError("y_true and y_pred must be 1d and the same length")
    if true_arr.size == 0:
        raise ValueError("cannot evaluate an empty prediction set")
    for name, arr in (("y_true", true_arr), ("y_pred", pred_arr)):
        if arr.min() < 0 or arr.max() >= num_classes:
            raise ValueError(f"{name} has labels outside [0, {num_classes})")
    matrix = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(matrix, (true_arr, pred_arr), 1)
    return matrix


@dataclass
class MetricReport:
    """Per-class and macro-averaged precision/recall/F1 plus accuracy.

    ``undefined`` lists (metric, class) pairs where a 0/0 ratio was
    reported as 0.0, so ablation reports can surf the caveat.
    """

    confusion: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    macro_precision: float
    macro_recall: float
    macro_f1: float
    accuracy: float
    undefined: tuple

    def to_dict(self) -> dict:
        return {
            "confusion": self.confusion.tolist(),
            "precision": self.precision.tolist(),
            "recall": self.recall.tolist(),
            "f1": self.f1.tolist(),
            "support": self.support.tolist(),
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
            "undefined": [list(pair) for pair in self.undefined],
        }


def metrics_from_confusion(matrix: np.ndarray) -> MetricReport:
    matrix = np.asarray(matrix, dtype=np.int64)
    num_classes = matrix.shape[0]
    if matrix.ndim != 2 or matrix.shape[1] != num_classes:
        raise ValueError(f"confusion matrix must be square, got {matrix.shape}")
    if matrix.sum() == 0:
        raise ValueError("confusion matrix is empty")
    diag = np.diag(matrix).astype(np.float64)
    col_sums = matrix.sum(axis=0).astype(np.float64)
    row_sums = matrix.sum(axis=1).astype(np.float64)

    undefined = []
    precision = np.zeros(num_classes)
    recall = np.zeros(num_classes)
    f1 = np.zeros(num_classes)
    for c in range(num_classes):
        if col_sums[c] > 0:
            precision[c] = diag[c] / col_sums[c]
        else:
            undefined.append(("precision", c))
        if row_sums[c] > 0:
            recall[c] = diag[c] / row_sums[c]
        else:
            undefined.append(("recall", c))
        if precision[c] + recall[c] > 0:
            f1[c] = 2.0 * precision[c] * recall[c] / (precision[c] + recall[c])
        else:
            undefined.append(("f1", c))
    if undefined:
        warnings.warn(
            f"metrics undefined (0/0 reported as 0.0) for: {undefined}",
            RuntimeWarning,
            stacklevel=2,
        )
    return MetricReport(
        confusion=matrix,
        precision=precision,
        recall=recall,
        f1=f1,
        support=row_sums.astype(np.int64),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        accuracy=float(diag.sum() / matrix.sum()),
        undefined=tuple(undefined),
    )


def evaluate_predictions(
    y_true: Sequence[int], y_pred: Sequence[int], num_classes: int = NUM_CLASSES
) -> MetricReport:
    return metrics_from_confusion(confusion_matrix(y_true, y_pred, num_classes))


def format_results_table(results: dict) -> str:
    """Fixed-width table of macro metrics, one row per model name."""
    header = f"{'model':<24} {'macro_f1':>9} {'macro_p':>9} {'macro_r':>9} {'accuracy':>9}"
    lines = [header, "-" * len(header)]
    for name, report in results.items():
        lines.append(
            f"{name:<24} {report.macro_f1:>9.4f} {report.macro_precision:>9.4f} "
            f"{report.macro_recall:>9.4f} {report.accuracy:>9.4f}"
        )
    return "\n".join(lines)


# Documented target metrics from the original evaluation of this
# architecture, run on a ~330k-tweet corpus collected from the platform's
# streaming API in early 2022. That corpus cannot be redistributed and the
# API access used to collect it is gone, so these exact numbers are not
# reproducible here; they are kept as comparison targets for runs on
# corpora you collect yourself.
RESULTS_NOTE = (
    "Target metrics come from the original evaluation of this architecture "
    "on a non-redistributable ~330k-tweet corpus, and the training "
    "hyperparameters behind them (loss beta and gamma, learning rates) were "
    "never published, so the exact numbers are not reproducible here. The "
    "toolkit reproduces the tables' structure and the pipeline's mechanics; "
    "expect different values on your own data."
)

REFERENCE_RESULTS = {
    "fused": {"macro_f1": 0.523, "macro_precision": 0.609, "macro_recall": 0.494, "accuracy": 0.494},
    "logistic_regression": {"macro_f1": 0.235, "macro_precision": 0.503, "macro_recall": 0.277, "accuracy": 0.277},
    "linear_svm": {"macro_f1": 0.221, "macro_precision": 0.320, "macro_recall": 0.271, "accuracy": 0.271},
    "decision_tree": {"macro_f1": 0.405, "macro_precision": 0.402, "macro_recall": 0.408, "accuracy": 0.408},
    "random_forest": {"macro_f1": 0.458, "macro_precision": 0.562, "macro_recall": 0.435, "accuracy": 0.435},
    "numeric_mlp": {"macro_f1": 0.213, "macro_precision": 0.235, "macro_recall": 0.268, "accuracy": 0.268},
    "text_only": {"macro_f1": 0.410, "macro_precision": 0.415, "macro_recall": 0.409, "accuracy": 0.409},
}

# Macro F1 and accuracy of the fused model after removing each feature,
# from the same original evaluation. The full model's row is
# REFERENCE_RESULTS["fused"].
REFERENCE_ABLATION = {
    "sentiment": {"macro_f1": 0.438, "accuracy": 0.432},
    "hashtags": {"macro_f1": 0.531, "accuracy": 0.502},
    "mentions": {"macro_f1": 0.490, "accuracy": 0.466},
    "followers": {"macro_f1": 0.429, "accuracy": 0.435},
    "following": {"macro_f1": 0.502, "accuracy": 0.474},
    "verified": {"macro_f1": 0.518, "accuracy": 0.491},
    "text_length": {"macro_f1": 0.523, "accuracy": 0.493},
}
