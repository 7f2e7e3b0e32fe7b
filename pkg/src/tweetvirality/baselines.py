"""Classic baselines over the scaled numeric features plus sentiment probabilities."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch
from torch import nn
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression, SGDClassifier
from sklearn.tree import DecisionTreeClassifier

from .config import TrainConfig
from .errors import ConfigError
from .evaluation import MetricReport, evaluate_predictions
from .losses import ClassBalancedFocalLoss
from .training import TrainHistory, evaluate_model, train_model

# text_only is the fused model with every extra channel disabled; it is
# trained through the main pipeline, not here.
SKLEARN_KINDS = (
    "logistic_regression",
    "linear_svm",
    "decision_tree",
    "random_forest",
)
BASELINE_KINDS = SKLEARN_KINDS + ("numeric_mlp", "text_only")


@dataclass
class BaselineData:
    """Feature matrices for the numeric baselines: min-max scaled numerics
    with the sentiment probabilities appended."""

    train_x: np.ndarray
    train_y: np.ndarray
    val_x: np.ndarray
    val_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray
    seed: int
    num_classes: int = 4


@dataclass
class BaselineResult:
    kind: str
    report: MetricReport
    history: Optional[TrainHistory] = None
    # Set when the training split held a single class; the model is then a
    # constant predictor rather than a real fit.
    degenerate: bool = False


class NumericMLP(nn.Module):
    """One hidden ReLU layer over the numeric feature vector."""

    def __init__(self, in_features: int, num_classes: int = 4, hidden: int = 32):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(in_features, hidden),
            nn.ReLU(),
            nn.Linear(hidden, num_classes),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


def build_estimator(kind: str, seed: int):
    if kind == "logistic_regression":
        return LogisticRegression(solver="newton-cg", penalty=None, max_iter=1000)
    if kind == "linear_svm":
        return SGDClassifier(loss="hinge", random_state=seed)
    if kind == "decision_tree":
        return DecisionTreeClassifier(criterion="gini", max_depth=None, random_state=seed)
    if kind == "random_forest":
        return RandomForestClassifier(
            n_estimators=100, max_depth=None, random_state=seed
        )
    raise ConfigError(f"unknown sklearn baseline {kind!r}; expected one of {list(SKLEARN_KINDS)}")


def loss_class_counts(labels: np.ndarray, num_classes: int) -> list:
    """Training-split counts for the loss weights; a class absent from the
    split is counted as a singleton since it contributes no examples but
    the weight formula needs a positive count."""
    counts = np.bincount(labels, minlength=num_classes).tolist()
    if any(c == 0 for c in counts):
        warnings.warn(
            f"classes {[i for i, c in enumerate(counts) if c == 0]} missing from "
            "the training split; weighting them as singletons",
            RuntimeWarning,
            stacklevel=2,
        )
        counts = [max(c, 1) for c in counts]
    return counts


def run_baseline(kind: str, data: BaselineData, train_config: TrainConfig) -> BaselineResult:
    """Fit one numeric baseline and score it on the test split.

    A single-class training split cannot be fit; the result is flagged
    degenerate and predicts that class everywhere.
    """
    train_classes = np.unique(data.train_y)
    if train_classes.size < 2:
        warnings.warn(
            f"{kind}: training split has a single class ({int(train_classes[0])}); "
            "reporting a constant predictor",
            RuntimeWarning,
            stacklevel=2,
        )
        constant = np.full(data.test_y.shape, int(train_classes[0]), dtype=np.int64)
        report = evaluate_predictions(data.test_y, constant, data.num_classes)
        return BaselineResult(kind=kind, report=report, degenerate=True)
    if kind in SKLEARN_KINDS:
        estimator = build_estimator(kind, data.seed)
        estimator.fit(data.train_x, data.train_y)
        predictions = estimator.predict(data.test_x)
        report = evaluate_predictions(data.test_y, predictions, data.num_classes)
        return BaselineResult(kind=kind, report=report)
    if kind != "numeric_mlp":
        raise ConfigError(f"run_baseline cannot train {kind!r}")

    with torch.random.fork_rng():
        torch.manual_seed(data.seed)
        model = NumericMLP(data.train_x.shape[1], data.num_classes)
    loss_fn = ClassBalancedFocalLoss(
        loss_class_counts(data.train_y, data.num_classes),
        beta=train_config.focal_beta,
        gamma=train_config.focal_gamma,
    )
    as_tensor = lambda a: torch.as_tensor(a, dtype=torch.float32)  # noqa: E731
    history = train_model(
        model,
        loss_fn,
        as_tensor(data.train_x),
        torch.as_tensor(data.train_y, dtype=torch.long),
        as_tensor(data.val_x),
        torch.as_tensor(data.val_y, dtype=torch.long),
        train_config,
    )
    report = evaluate_model(
        model,
        as_tensor(data.test_x),
        torch.as_tensor(data.test_y, dtype=torch.long),
        train_config.batch_size,
    )
    return BaselineResult(kind="numeric_mlp", report=report, history=history)
