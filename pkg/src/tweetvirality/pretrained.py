"""Optional pretrained backbone bundle backed by Hugging Face checkpoints.

Importing this module registers the ``pretrained`` backbone. It needs the
``transformers`` extra installed and (on first use) network access or a
populated cache directory; point ``TWEETVIRALITY_CACHE`` at one to pin it.
"""

from __future__ import annotations

import os
from typing import Sequence

import torch
from torch import nn

from .corpus import TweetRecord
from .encoders import EncodedBatch, EncoderBundle, register_backbone
from .errors import ConfigError
from .features import NUMERIC_FEATURES, numeric_feature_values

DEFAULT_BACKBONE = "vinai/bertweet-base"
DEFAULT_SENTIMENT = "cardiffnlp/twitter-roberta-base-sentiment"
CACHE_ENV_VAR = "TWEETVIRALITY_CACHE"


def _load_transformers():
    try:
        import transformers
    except ImportError as exc:
        raise ConfigError(
            "the 'pretrained' backbone needs the transformers extra; "
            "install with: pip install tweetvirality[pretrained]"
        ) from exc
    return transformers


def _cache_dir():
    return os.environ.get(CACHE_ENV_VAR) or None


class PretrainedFeaturizer:
    def __init__(self, tokenizer, sentiment_tokenizer, max_length: int):
        self.tokenizer = tokenizer
        self.sentiment_tokenizer = sentiment_tokenizer
        self.max_length = max_length

    def encode_records(
        self,
        records: Sequence[TweetRecord],
        *,
        features: Sequence[str] = NUMERIC_FEATURES,
        parse_text_counts: bool = True,
        with_sentiment: bool = True,
    ) -> EncodedBatch:
        sep = self.tokenizer.sep_token or "</s>"
        texts = []
        for record in records:
            values = numeric_feature_values(
                record, parse_text_counts=parse_text_counts, enabled=features
            )
            pieces = [record.text] + [str(v) for v in values]
            texts.append(f" {sep} ".join(pieces))
        encoded = self.tokenizer(
            texts,
            padding=True,
            truncation=True,
            max_length=self.max_length,
            return_tensors="pt",
        )
        sentiment_ids = sentiment_mask = None
        if with_sentiment:
            raw = self.sentiment_tokenizer(
                [record.text for record in records],
                padding=True,
                truncation=True,
                max_length=self.max_length,
                return_tensors="pt",
            )
            sentiment_ids = raw["input_ids"]
            sentiment_mask = raw["attention_mask"]
        return EncodedBatch(
            token_ids=encoded["input_ids"],
            attention_mask=encoded["attention_mask"],
            sentiment_ids=sentiment_ids,
            sentiment_mask=sentiment_mask,
        )


class PretrainedBackbone(nn.Module):
    def __init__(self, model):
        super().__init__()
        self.model = model
        self.hidden_size = model.config.hidden_size

    def forward(self, token_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        output = self.model(input_ids=token_ids, attention_mask=attention_mask)
        return output.last_hidden_state[:, 0]


class PretrainedSentiment(nn.Module):
    def __init__(self, model):
        super().__init__()
        if model.config.num_labels != 3:
            raise ConfigError(
                f"sentiment checkpoint must have 3 labels, got {model.config.num_labels}"
            )
        self.model = model

    def forward(self, token_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        logits = self.model(input_ids=token_ids, attention_mask=attention_mask).logits
        return torch.softmax(logits, dim=-1)


def _build_pretrained(seed: int, **options) -> EncoderBundle:
    transformers = _load_transformers()
    model_name = options.pop("model_name", DEFAULT_BACKBONE)
    sentiment_model_name = options.pop("sentiment_model_name", DEFAULT_SENTIMENT)
    max_length = options.pop("max_length", 128)
    if options:
        raise ConfigError(f"unknown pretrained options: {sorted(options)}")
    cache = _cache_dir()
    tokenizer = transformers.AutoTokenizer.from_pretrained(model_name, cache_dir=cache)
    sentiment_tokenizer = transformers.AutoTokenizer.from_pretrained(
        sentiment_model_name, cache_dir=cache
    )
    backbone = PretrainedBackbone(
        transformers.AutoModel.from_pretrained(model_name, cache_dir=cache)
    )
    sentiment = PretrainedSentiment(
        transformers.AutoModelForSequenceClassification.from_pretrained(
            sentiment_model_name, cache_dir=cache
        )
    )
    return EncoderBundle(
        name="pretrained",
        featurizer=PretrainedFeaturizer(tokenizer, sentiment_tokenizer, max_length),
        backbone=backbone,
        sentiment=sentiment,
    )


register_backbone("pretrained", _build_pretrained)
