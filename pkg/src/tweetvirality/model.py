"""Fused virality classifier: text backbone output joined with sentiment probabilities."""

from __future__ import annotations

from typing import Optional

import torch
from torch import nn

from .encoders import EncodedBatch

NUM_VIRALITY_CLASSES = 4
SENTIMENT_DIM = 3


class ViralityClassifier(nn.Module):
    """Pooled backbone vector, optionally concatenated with the 3-way
    sentiment distribution, classified by a flat MLP.

    Each hidden layer matches the fused input width, with tanh and dropout
    before the output projection. Depth defaults to one hidden layer;
    deeper heads did not help in practice but stay available as a knob.
    Both the backbone and the sentiment module train end to end with the
    head.
    """

    def __init__(
        self,
        backbone: nn.Module,
        sentiment: Optional[nn.Module] = None,
        num_classes: int = NUM_VIRALITY_CLASSES,
        dropout: float = 0.1,
        hidden_layers: int = 1,
    ):
        super().__init__()
        if hidden_layers < 1:
            raise ValueError(f"hidden_layers must be >= 1, got {hidden_layers}")
        self.backbone = backbone
        self.sentiment = sentiment
        self.num_classes = num_classes
        self.fusion_width = backbone.hidden_size + (SENTIMENT_DIM if sentiment is not None else 0)
        layers = []
        for _ in range(hidden_layers):
            layers.extend(
                [
                    nn.Linear(self.fusion_width, self.fusion_width),
                    nn.Tanh(),
                    nn.Dropout(dropout),
                ]
            )
        layers.append(nn.Linear(self.fusion_width, num_classes))
        self.classifier = nn.Sequential(*layers)

    def fuse(self, batch: EncodedBatch) -> torch.Tensor:
        """The classifier input: pooled text vector plus sentiment probs."""
        pooled = self.backbone(batch.token_ids, batch.attention_mask)
        if self.sentiment is None:
            return pooled
        if batch.sentiment_ids is None:
            raise ValueError("batch was encoded without the sentiment stream")
        probs = self.sentiment(batch.sentiment_ids, batch.sentiment_mask)
        return torch.cat([pooled, probs], dim=-1)

    def forward(self, batch: EncodedBatch) -> torch.Tensor:
        return self.classifier(self.fuse(batch))

    @torch.no_grad()
    def predict_proba(self, batch: EncodedBatch) -> torch.Tensor:
        return torch.softmax(self.forward(batch), dim=-1)

    @torch.no_grad()
    def predict(self, batch: EncodedBatch) -> torch.Tensor:
        return self.forward(batch).argmax(dim=-1)

    def parameter_groups(self, encoder_lr: float, head_lr: float) -> list:
        """Optimizer groups: encoder modules at one rate, the head at another."""
        encoder_params = list(self.backbone.parameters())
        if self.sentiment is not None:
            encoder_params.extend(self.sentiment.parameters())
        return [
            {"params": encoder_params, "lr": encoder_lr},
            {"params": self.classifier.parameters(), "lr": head_lr},
        ]
