"""Class-balanced focal loss for the skewed virality bands."""

from __future__ import annotations

from typing import Sequence

import torch
from torch import nn
from torch.nn import functional as F


def effective_number_weights(class_counts: Sequence[int], beta: float) -> torch.Tensor:
    """Per-class weights (1 - beta) / (1 - beta**n), normalized to sum to
    the number of classes.

    Requires every count >= 1; a zero count makes the effective number
    vanish and the weight undefined. Computed in float64.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1), got {beta}")
    counts = list(class_counts)
    if len(counts) < 2:
        raise ValueError(f"need at least 2 classes, got {len(counts)}")
    if any(n < 1 for n in counts):
        raise ValueError(f"class counts must all be >= 1, got {counts}")
    counts_t = torch.tensor(counts, dtype=torch.float64)
    if beta == 0.0:
        raw = torch.ones_like(counts_t)
    else:
        raw = (1.0 - beta) / (1.0 - torch.pow(torch.tensor(beta, dtype=torch.float64), counts_t))
    return raw * (len(counts) / raw.sum())


class ClassBalancedFocalLoss(nn.Module):
    """Focal loss scaled by effective-number class weights, averaged over
    the batch.

    Log-probabilities go through log-softmax, so large logits stay stable.
    The math runs in the dtype of the incoming logits; weights are kept in
    float64 and cast per call.
    """

    def __init__(self, class_counts: Sequence[int], beta: float = 0.9999, gamma: float = 2.0):
        super().__init__()
        if gamma < 0.0:
            raise ValueError(f"gamma must be >= 0, got {gamma}")
        self.beta = beta
        self.gamma = gamma
        self.num_classes = len(class_counts)
        self.register_buffer("weights", effective_number_weights(class_counts, beta))

    def forward(self, logits: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
        if logits.ndim != 2 or logits.shape[1] != self.num_classes:
            raise ValueError(
                f"expected logits of shape (n, {self.num_classes}), got {tuple(logits.shape)}"
            )
        if logits.shape[0] == 0:
            raise ValueError("empty batch")
        if targets.ndim != 1 or targets.shape[0] != logits.shape[0]:
            raise ValueError(
                f"targets shape {tuple(targets.shape)} does not match batch size {logits.shape[0]}"
            )
        if targets.min() < 0 or targets.max() >= self.num_classes:
            raise ValueError("targets out of range")
        log_probs = F.log_softmax(logits, dim=-1)
        log_p = log_probs.gather(1, targets.view(-1, 1)).squeeze(1)
        p = log_p.exp()
        weight = self.weights.to(logits.dtype)[targets]
        loss = weight * torch.pow(1.0 - p, self.gamma) * (-log_p)
        return loss.mean()
