"""Numeric feature extraction from tweet records, plus min-max scaling."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import TweetRecord
from .errors import ConfigError

# Canonical order of the numeric features serialized into the model input
# and fed to the baselines. The sentiment channel is handled separately.
NUMERIC_FEATURES = (
    "hashtags",
    "mentions",
    "followers",
    "following",
    "verified",
    "text_length",
)
ALL_FEATURES = ("sentiment",) + NUMERIC_FEATURES

_HASHTAG_RE = re.compile(r"#\w+")
_MENTION_RE = re.compile(r"@\w+")


def count_hashtags(text: str) -> int:
    return len(_HASHTAG_RE.findall(text))


def count_mentions(text: str) -> int:
    return len(_MENTION_RE.findall(text))


def validate_feature_names(names: Sequence[str]) -> None:
    seen = set()
    for name in names:
        if name not in ALL_FEATURES:
            raise ConfigError(
                f"unknown feature {name!r}; expected one of {list(ALL_FEATURES)}"
            )
        if name in seen:
            raise ConfigError(f"duplicate feature {name!r}")
        seen.add(name)


def numeric_feature_values(
    record: TweetRecord,
    *,
    parse_text_counts: bool = True,
    enabled: Sequence[str] = NUMERIC_FEATURES,
) -> list:
    """Integer feature values for one record, in the order ``enabled`` gives
    them ("sentiment" entries are skipped; that channel is separate).

    Hashtag and mention counts come from the text by default and fall back
    to the stored collection-time counts when ``parse_text_counts`` is off.
    """
    validate_feature_names(enabled)
    values = []
    for name in enabled:
        if name == "sentiment":
            continue
        if name == "hashtags":
            values.append(count_hashtags(record.text) if parse_text_counts else record.hashtag_count)
        elif name == "mentions":
            values.append(count_mentions(record.text) if parse_text_counts else record.mention_count)
        elif name == "followers":
            values.append(record.followers)
        elif name == "following":
            values.append(record.following)
        elif name == "verified":
            values.append(int(record.verified))
        else:
            values.append(len(record.text))
    return values


def numeric_matrix(
    records: Sequence[TweetRecord],
    *,
    parse_text_counts: bool = True,
    enabled: Sequence[str] = NUMERIC_FEATURES,
) -> np.ndarray:
    """(n, k) float64 matrix of the enabled numeric features."""
    rows = [
        numeric_feature_values(
            r, parse_text_counts=parse_text_counts, enabled=enabled
        )
        for r in records
    ]
    width = len([n for n in enabled if n != "sentiment"])
    return np.asarray(rows, dtype=np.float64).reshape(len(records), width)


@dataclass
class MinMaxScaler:
    """Per-column min-max scaler fit on the training split only.

    Constant columns are flagged and transform to 0.0. Values outside the
    fitted range are not clipped.
    """

    minimums: np.ndarray
    maximums: np.ndarray
    constant: np.ndarray

    @classmethod
    def fit(cls, matrix: np.ndarray) -> "MinMaxScaler":
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] == 0:
            raise ValueError(f"expected a non-empty 2d matrix, got shape {matrix.shape}")
        minimums = matrix.min(axis=0)
        maximums = matrix.max(axis=0)
        return cls(
            minimums=minimums,
            maximums=maximums,
            constant=maximums == minimums,
        )

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != self.minimums.shape[0]:
            raise ValueError(
                f"expected shape (n, {self.minimums.shape[0]}), got {matrix.shape}"
            )
        span = np.where(self.constant, 1.0, self.maximums - self.minimums)
        scaled = (matrix - self.minimums) / span
        scaled[:, self.constant] = 0.0
        return scaled

    def to_dict(self) -> dict:
        return {
            "minimums": self.minimums.tolist(),
            "maximums": self.maximums.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MinMaxScaler":
        minimums = np.asarray(payload["minimums"], dtype=np.float64)
        maximums = np.asarray(payload["maximums"], dtype=np.float64)
        return cls(minimums=minimums, maximums=maximums, constant=maximums == minimums)
