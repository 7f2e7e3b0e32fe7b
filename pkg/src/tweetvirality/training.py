"""AdamW training loop with early stopping on validation macro F1."""

from __future__ import annotations

import copy
import math
import random
import time
from dataclasses import dataclass, field

import torch

from .config import TrainConfig
from .errors import DivergenceError
from .evaluation import MetricReport, evaluate_predictions

__all__ = [
    "EpochStats",
    "TrainHistory",
    "shuffled_order",
    "train_model",
    "predict_in_batches",
    "evaluate_model",
]


def shuffled_order(n: int, seed: int, epoch: int) -> list:
    """Deterministic permutation of range(n) for one epoch.

    Seeding with a string keeps the stream stable across interpreter runs
    and independent of the global RNG.
    """
    return random.Random(f"{seed}:{epoch}").sample(range(n), n)


def _take(inputs, indices):
    if isinstance(inputs, torch.Tensor):
        return inputs[torch.as_tensor(indices, dtype=torch.long)]
    return inputs.select(indices)


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    val_macro_f1: float
    val_accuracy: float
    seconds: float


@dataclass
class TrainHistory:
    epochs: list = field(default_factory=list)
    best_epoch: int = 0
    best_val_macro_f1: float = -1.0
    first_batch_loss: float = math.nan
    stopped_early: bool = False
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "epochs": [vars(e) for e in self.epochs],
            "best_epoch": self.best_epoch,
            "best_val_macro_f1": self.best_val_macro_f1,
            "first_batch_loss": self.first_batch_loss,
            "stopped_early": self.stopped_early,
            "seconds": self.seconds,
        }


@torch.no_grad()
def predict_in_batches(model, inputs, batch_size: int = 32) -> torch.Tensor:
    model.eval()
    predictions = []
    for start in range(0, len(inputs), batch_size):
        logits = model(_take(inputs, list(range(start, min(start + batch_size, len(inputs))))))
        predictions.append(logits.argmax(dim=-1))
    return torch.cat(predictions)


def evaluate_model(model, inputs, labels: torch.Tensor, batch_size: int = 32) -> MetricReport:
    predictions = predict_in_batches(model, inputs, batch_size)
    return evaluate_predictions(labels.tolist(), predictions.tolist())


@torch.no_grad()
def _validation_pass(model, loss_fn, inputs, labels, batch_size: int) -> tuple:
    model.eval()
    n = len(inputs)
    total = 0.0
    predictions = []
    for start in range(0, n, batch_size):
        idx = list(range(start, min(start + batch_size, n)))
        logits = model(_take(inputs, idx))
        total += loss_fn(logits, labels[torch.as_tensor(idx, dtype=torch.long)]).item() * len(idx)
        predictions.extend(logits.argmax(dim=-1).tolist())
    return total / n, evaluate_predictions(labels.tolist(), predictions)


def train_model(
    model,
    loss_fn,
    train_inputs,
    train_labels: torch.Tensor,
    val_inputs,
    val_labels: torch.Tensor,
    config: TrainConfig,
) -> TrainHistory:
    """Train with AdamW until validation macro F1 stops improving.

    Improvement is strict, so a tie keeps the earlier epoch as best;
    ``config.patience`` non-improving epochs in a row stop the run. The
    model is left holding the best epoch's weights.

    Models exposing ``parameter_groups`` get split encoder/head learning
    rates; anything else trains entirely at the head rate.
    """
    n = len(train_inputs)
    if n == 0 or len(val_inputs) == 0:
        raise ValueError("train and validation splits must both be non-empty")
    torch.manual_seed(config.seed)
    if hasattr(model, "parameter_groups"):
        groups = model.parameter_groups(config.encoder_lr, config.head_lr)
    else:
        groups = [{"params": list(model.parameters()), "lr": config.head_lr}]
    optimizer = torch.optim.AdamW(groups, weight_decay=config.weight_decay)

    history = TrainHistory()
    best_state = None
    since_best = 0
    started = time.monotonic()
    for epoch in range(1, config.max_epochs + 1):
        epoch_started = time.monotonic()
        model.train()
        order = shuffled_order(n, config.seed, epoch)
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            logits = model(_take(train_inputs, idx))
            loss = loss_fn(logits, train_labels[torch.as_tensor(idx, dtype=torch.long)])
            if not torch.isfinite(loss):
                raise DivergenceError(f"non-finite loss at epoch {epoch}")
            if epoch == 1 and start == 0:
                history.first_batch_loss = loss.item()
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.item() * len(idx)
        val_loss, report = _validation_pass(
            model, loss_fn, val_inputs, val_labels, config.batch_size
        )
        history.epochs.append(
            EpochStats(
                epoch=epoch,
                train_loss=total / n,
                val_loss=val_loss,
                val_macro_f1=report.macro_f1,
                val_accuracy=report.accuracy,
                seconds=time.monotonic() - epoch_started,
            )
        )
        if report.macro_f1 > history.best_val_macro_f1:
            history.best_val_macro_f1 = report.macro_f1
            history.best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())
            since_best = 0
        else:
            since_best += 1
            if since_best >= config.patience:
                history.stopped_early = True
                break
    model.load_state_dict(best_state)
    history.seconds = time.monotonic() - started
    return history
