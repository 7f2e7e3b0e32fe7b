"""Text encoding: tokenizer, input serialization, and pluggable backbones.

A backbone bundle pairs three things behind one name:

* a featurizer that turns records into padded token-id batches, serializing
  the numeric feature values into the token stream after the text,
* a trainable backbone module mapping (ids, mask) to one pooled vector per
  record,
* a 3-way sentiment module mapping the raw-text token stream to class
  probabilities.

The default ``toy-random`` bundle is a small randomly initialized
transformer with a hashing tokenizer, used for tests and smoke runs.
Pretrained backbones register themselves under separate names.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import torch
from torch import nn

from .corpus import TweetRecord
from .errors import ConfigError
from .features import NUMERIC_FEATURES, numeric_feature_values

PAD_ID = 0
START_ID = 1
SEP_ID = 2
UNK_ID = 3
_NUM_SPECIALS = 4


class HashingTokenizer:
    """Deterministic whitespace tokenizer hashing words into a fixed vocab."""

    def __init__(self, vocab_size: int = 4096, max_length: int = 128):
        if vocab_size <= _NUM_SPECIALS:
            raise ConfigError(f"vocab_size must exceed {_NUM_SPECIALS}, got {vocab_size}")
        if max_length < 8:
            raise ConfigError(f"max_length must be at least 8, got {max_length}")
        self.vocab_size = vocab_size
        self.max_length = max_length

    def word_id(self, word: str) -> int:
        span = self.vocab_size - _NUM_SPECIALS
        return _NUM_SPECIALS + zlib.crc32(word.encode("utf-8")) % span

    def word_ids(self, text: str) -> list:
        return [self.word_id(w) for w in text.split()]

    def build_sequence(self, text: str, numeric_strings: Sequence[str]) -> list:
        """Token ids for one record: start, text, then each value, all
        separator-delimited.

        Overlong sequences are truncated to ``max_length`` with the final
        separator kept, so the start token always survives.
        """
        ids = [START_ID] + self.word_ids(text) + [SEP_ID]
        for value in numeric_strings:
            ids.extend(self.word_ids(value))
            ids.append(SEP_ID)
        if len(ids) > self.max_length:
            ids = ids[: self.max_length - 1] + [SEP_ID]
        return ids


def pad_sequences(sequences: Sequence[Sequence[int]]) -> tuple:
    """Right-pad to the batch maximum; returns (ids, mask) long/bool tensors."""
    width = max(len(s) for s in sequences)
    ids = torch.full((len(sequences), width), PAD_ID, dtype=torch.long)
    mask = torch.zeros((len(sequences), width), dtype=torch.bool)
    for row, seq in enumerate(sequences):
        ids[row, : len(seq)] = torch.tensor(seq, dtype=torch.long)
        mask[row, : len(seq)] = True
    return ids, mask


@dataclass
class EncodedBatch:
    """Padded model inputs for a batch of records.

    ``sentiment_ids``/``sentiment_mask`` carry the raw-text-only stream for
    the sentiment module and are None when sentiment is disabled.
    """

    token_ids: torch.Tensor
    attention_mask: torch.Tensor
    sentiment_ids: Optional[torch.Tensor] = None
    sentiment_mask: Optional[torch.Tensor] = None

    def __len__(self) -> int:
        return self.token_ids.shape[0]

    def select(self, indices) -> "EncodedBatch":
        idx = torch.as_tensor(indices, dtype=torch.long)
        return EncodedBatch(
            token_ids=self.token_ids[idx],
            attention_mask=self.attention_mask[idx],
            sentiment_ids=None if self.sentiment_ids is None else self.sentiment_ids[idx],
            sentiment_mask=None if self.sentiment_mask is None else self.sentiment_mask[idx],
        )


class ToyFeaturizer:
    """Record-to-tensor encoding for the toy backbone."""

    def __init__(self, tokenizer: HashingTokenizer):
        self.tokenizer = tokenizer

    def encode_records(
        self,
        records: Sequence[TweetRecord],
        *,
        features: Sequence[str] = NUMERIC_FEATURES,
        parse_text_counts: bool = True,
        with_sentiment: bool = True,
    ) -> EncodedBatch:
        sequences = []
        for record in records:
            values = numeric_feature_values(
                record, parse_text_counts=parse_text_counts, enabled=features
            )
            sequences.append(
                self.tokenizer.build_sequence(record.text, [str(v) for v in values])
            )
        ids, mask = pad_sequences(sequences)
        sentiment_ids = sentiment_mask = None
        if with_sentiment:
            # The sentiment stream sees only the raw text, never the
            # serialized numerics.
            blank = [r.id for r in records if not r.text.strip()]
            if blank:
                raise ValueError(f"sentiment input needs non-empty text; blank records: {blank}")
            word_rows = [
                [START_ID] + self.tokenizer.word_ids(record.text)[: self.tokenizer.max_length - 1]
                for record in records
            ]
            sentiment_ids, sentiment_mask = pad_sequences(word_rows)
        return EncodedBatch(
            token_ids=ids,
            attention_mask=mask,
            sentiment_ids=sentiment_ids,
            sentiment_mask=sentiment_mask,
        )


class ToyTextBackbone(nn.Module):
    """Small transformer encoder pooled at the start-token position."""

    def __init__(
        self,
        vocab_size: int = 4096,
        hidden_size: int = 64,
        num_layers: int = 2,
        num_heads: int = 4,
        ffn_size: int = 128,
        dropout: float = 0.1,
        max_length: int = 128,
    ):
        super().__init__()
        self.hidden_size = hidden_size
        self.token_embedding = nn.Embedding(vocab_size, hidden_size, padding_idx=PAD_ID)
        self.position_embedding = nn.Embedding(max_length, hidden_size)
        layer = nn.TransformerEncoderLayer(
            d_model=hidden_size,
            nhead=num_heads,
            dim_feedforward=ffn_size,
            dropout=dropout,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(
            layer, num_layers=num_layers, enable_nested_tensor=False
        )

    def forward(self, token_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        if token_ids.shape[1] > self.position_embedding.num_embeddings:
            raise ValueError(
                f"sequence length {token_ids.shape[1]} exceeds the maximum "
                f"{self.position_embedding.num_embeddings}; truncate when tokenizing"
            )
        positions = torch.arange(token_ids.shape[1], device=token_ids.device)
        hidden = self.token_embedding(token_ids) + self.position_embedding(positions)
        hidden = self.encoder(hidden, src_key_padding_mask=~attention_mask)
        return hidden[:, 0]


class ToySentimentModel(nn.Module):
    """Mean-pooled embedding classifier over raw-text tokens; 3-way softmax."""

    NUM_CLASSES = 3

    def __init__(self, vocab_size: int = 4096, embedding_size: int = 32):
        super().__init__()
        self.embedding = nn.Embedding(vocab_size, embedding_size, padding_idx=PAD_ID)
        self.head = nn.Linear(embedding_size, self.NUM_CLASSES)

    def forward(self, token_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        embedded = self.embedding(token_ids)
        mask = attention_mask.unsqueeze(-1).to(embedded.dtype)
        pooled = (embedded * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)
        return torch.softmax(self.head(pooled), dim=-1)


@dataclass
class EncoderBundle:
    name: str
    featurizer: object
    backbone: nn.Module
    sentiment: nn.Module


def _build_toy(seed: int, **options) -> EncoderBundle:
    vocab_size = options.pop("vocab_size", 4096)
    max_length = options.pop("max_length", 128)
    hidden_size = options.pop("hidden_size", 64)
    num_layers = options.pop("num_layers", 2)
    num_heads = options.pop("num_heads", 4)
    ffn_size = options.pop("ffn_size", 128)
    dropout = options.pop("dropout", 0.1)
    if options:
        raise ConfigError(f"unknown toy-random options: {sorted(options)}")
    tokenizer = HashingTokenizer(vocab_size=vocab_size, max_length=max_length)
    with torch.random.fork_rng():
        torch.manual_seed(seed)
        backbone = ToyTextBackbone(
            vocab_size=vocab_size,
            hidden_size=hidden_size,
            num_layers=num_layers,
            num_heads=num_heads,
            ffn_size=ffn_size,
            dropout=dropout,
            max_length=max_length,
        )
        sentiment = ToySentimentModel(vocab_size=vocab_size)
    return EncoderBundle(
        name="toy-random",
        featurizer=ToyFeaturizer(tokenizer),
        backbone=backbone,
        sentiment=sentiment,
    )


_REGISTRY: dict = {"toy-random": _build_toy}


def register_backbone(name: str, factory: Callable) -> None:
    """Register a bundle factory with signature ``factory(seed, **options)``."""
    _REGISTRY[name] = factory


def available_backbones() -> list:
    return sorted(_REGISTRY)


def build_encoder(name: str, seed: int = 0, **options) -> EncoderBundle:
    if name not in _REGISTRY:
        if name.startswith("pretrained"):
            # Pretrained bundles register lazily to keep transformers optional.
            from . import pretrained  # noqa: F401
        if name not in _REGISTRY:
            raise ConfigError(
                f"unknown backbone {name!r}; available: {available_backbones()}"
            )
    return _REGISTRY[name](seed, **options)
