"""Tweet corpus ingestion: JSONL loading, dedup, virality labels, rebalancing, splits."""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from .errors import CorpusValidationError

NUM_CLASSES = 4
BAND_NAMES = ("0", "1", "2-20", "21+")
TOPIC_UNKNOWN = "unknown"

# The eight domain-entity pairings used when collecting the corpus.
DEFAULT_TOPICS = (
    "cryptocurrencies",
    "tv_movies",
    "pets",
    "video_games",
    "cell_phones",
    "covid19",
    "football",
    "kpop",
)

_COUNT_FIELDS = (
    "hashtag_count",
    "mention_count",
    "followers",
    "following",
    "retweet_count",
    "like_count",
    "reply_count",
    "quote_count",
)
_STRING_FIELDS = ("id", "text", "created_at", "source_client")


@dataclass(frozen=True)
class TweetRecord:
    """One collected tweet with its 24h engagement counts."""

    id: str
    text: str
    created_at: str
    source_client: str
    hashtag_count: int
    mention_count: int
    followers: int
    following: int
    verified: bool
    retweet_count: int
    like_count: int
    reply_count: int
    quote_count: int
    topic: str = TOPIC_UNKNOWN

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LineError:
    line: int
    field: str
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.field}: {self.message}"


@dataclass(frozen=True)
class IngestFilters:
    """Ingestion-time predicates applied from raw record fields.

    ``lang`` and ``is_retweet`` are read from the raw line when present;
    records without them pass the corresponding predicate.
    """

    topics: Optional[tuple] = None
    require_english: bool = True
    require_original: bool = True


def _validate_line(obj: dict, line_no: int, errors: list) -> Optional[TweetRecord]:
    if not isinstance(obj, dict):
        errors.append(LineError(line_no, "<record>", "expected an object"))
        return None
    bad = False
    for name in _STRING_FIELDS:
        value = obj.get(name)
        if not isinstance(value, str) or not value.strip():
            what = "missing" if name not in obj else "expected a non-empty string"
            errors.append(LineError(line_no, name, what))
            bad = True
    for name in _COUNT_FIELDS:
        value = obj.get(name)
        if isinstance(value, bool) or not isinstance(value, int):
            what = "missing" if name not in obj else "expected an integer"
            errors.append(LineError(line_no, name, what))
            bad = True
        elif value < 0:
            errors.append(LineError(line_no, name, "must be >= 0"))
            bad = True
    if not isinstance(obj.get("verified"), bool):
        what = "missing" if "verified" not in obj else "expected a boolean"
        errors.append(LineError(line_no, "verified", what))
        bad = True
    topic = obj.get("topic", TOPIC_UNKNOWN)
    if not isinstance(topic, str) or not topic:
        errors.append(LineError(line_no, "topic", "expected a non-empty string"))
        bad = True
    if bad:
        return None
    return TweetRecord(
        id=obj["id"],
        text=obj["text"],
        created_at=obj["created_at"],
        source_client=obj["source_client"],
        hashtag_count=obj["hashtag_count"],
        mention_count=obj["mention_count"],
        followers=obj["followers"],
        following=obj["following"],
        verified=obj["verified"],
        retweet_count=obj["retweet_count"],
        like_count=obj["like_count"],
        reply_count=obj["reply_count"],
        quote_count=obj["quote_count"],
        topic=topic,
    )


def _passes_filters(raw: dict, record: TweetRecord, filters: IngestFilters) -> bool:
    if filters.require_english:
        lang = raw.get("lang")
        if lang is not None and lang != "en":
            return False
    if filters.require_original and bool(raw.get("is_retweet", False)):
        return False
    if filters.topics is not None and record.topic not in filters.topics:
        return False
    return True


def load_tweet_records(path, filters: Optional[IngestFilters] = None) -> list:
    """Parse a line-delimited record file into validated ``TweetRecord``s.

    Duplicate ids keep the first occurrence. Raises ``CorpusValidationError``
    with the full line-numbered error list if any line fails validation;
    unreadable paths raise the underlying ``OSError``.
    """
    errors: list = []
    records: list = []
    seen = set()
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append(LineError(line_no, "<json>", f"parse error: {exc.msg}"))
                continue
            record = _validate_line(raw, line_no, errors)
            if record is None:
                continue
            if filters is not None and not _passes_filters(raw, record, filters):
                continue
            if record.id in seen:
                continue
            seen.add(record.id)
            records.append(record)
    if errors:
        raise CorpusValidationError(errors)
    return records


def write_records(path, records: Sequence[TweetRecord]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


def assign_virality_class(retweet_count: int) -> int:
    """Map a 24h retweet count onto the four virality bands.

    0 -> 0, 1 -> 1, 2..20 -> 2, 21+ -> 3.
    """
    if retweet_count < 0:
        raise ValueError(f"retweet_count must be >= 0, got {retweet_count}")
    if retweet_count == 0:
        return 0
    if retweet_count == 1:
        return 1
    if retweet_count <= 20:
        return 2
    return 3


def class_counts(records: Sequence[TweetRecord]) -> list:
    counts = [0] * NUM_CLASSES
    for record in records:
        counts[assign_virality_class(record.retweet_count)] += 1
    return counts


def rebalance_zero_class(records: Sequence[TweetRecord], seed: int) -> list:
    """Downsample zero-retweet records to match the nonzero total.

    Sampling is uniform without replacement and deterministic per seed.
    When the zero class is not larger, the corpus is returned unchanged.
    Record order and record contents are preserved.
    """
    zero_positions = [i for i, r in enumerate(records) if r.retweet_count == 0]
    n_nonzero = len(records) - len(zero_positions)
    if len(zero_positions) <= n_nonzero:
        return list(records)
    kept = set(random.Random(seed).sample(zero_positions, n_nonzero))
    return [
        r
        for i, r in enumerate(records)
        if r.retweet_count != 0 or i in kept
    ]


@dataclass
class DatasetSplit:
    """Random 80:10:10 partition of a corpus, disjoint by id."""

    train: list
    validation: list
    test: list
    seed: int


def _holdout_size(n: int) -> int:
    # Nearest integer to n/10, ties rounded down so train keeps the extra
    # record; keeps every subset within one record of the exact ratio.
    return (n + 4) // 10


def split_dataset(records: Sequence[TweetRecord], seed: int) -> DatasetSplit:
    """Randomly partition records into train/validation/test at 80:10:10."""
    n = len(records)
    if n < 10:
        raise ValueError(f"need at least 10 records to split, got {n}")
    order = random.Random(seed).sample(range(n), n)
    holdout = _holdout_size(n)
    validation = [records[i] for i in order[:holdout]]
    test = [records[i] for i in order[holdout : 2 * holdout]]
    train = [records[i] for i in order[2 * holdout :]]
    return DatasetSplit(train=train, validation=validation, test=test, seed=seed)


def corpus_statistics(records: Sequence[TweetRecord]) -> dict:
    """Per-topic and per-class counts for a statistics report."""
    per_class = class_counts(records)
    return {
        "total": len(records),
        "per_topic": dict(sorted(Counter(r.topic for r in records).items())),
        "per_class": {BAND_NAMES[i]: per_class[i] for i in range(NUM_CLASSES)},
    }
