#!/usr/bin/env python3
"""Generate a synthetic raw tweet corpus for trying out the pipeline.

The output mimics what a collection job would produce: line-delimited JSON
with engagement counts measured 24 hours after posting, a heavy zero-retweet
skew, and a few rows that ingestion is expected to drop (duplicates,
non-English, retweets). None of the text is real.
"""

from __future__ import annotations

import argparse
import json
import random
from datetime import datetime, timedelta, timezone

from tweetvirality.corpus import DEFAULT_TOPICS

WORDS = {
    "cryptocurrencies": ["coin", "wallet", "chart", "dip", "ledger", "token"],
    "tv_movies": ["episode", "finale", "trailer", "scene", "cast", "season"],
    "pets": ["cat", "dog", "vet", "treats", "paws", "adopted"],
    "video_games": ["patch", "boss", "speedrun", "loot", "server", "ranked"],
    "cell_phones": ["battery", "camera", "update", "screen", "charger", "specs"],
    "covid19": ["booster", "testing", "masks", "variant", "clinic", "recovery"],
    "football": ["match", "keeper", "transfer", "derby", "offside", "fixture"],
    "kpop": ["comeback", "teaser", "fanmeet", "album", "stage", "lightstick"],
}
CLIENTS = ["Twitter Web App", "Twitter for iPhone", "Twitter for Android"]


def make_text(rng: random.Random, topic: str) -> str:
    words = rng.sample(WORDS[topic], k=rng.randint(3, 6))
    rng.shuffle(words)
    parts = [" ".join(words)]
    for _ in range(rng.choices((0, 1, 2), weights=(6, 3, 1))[0]):
        parts.append(f"#{rng.choice(WORDS[topic])}{rng.randint(1, 99)}")
    for _ in range(rng.choices((0, 1), weights=(7, 3))[0]):
        parts.append(f"@user{rng.randint(1, 500)}")
    return " ".join(parts)


def make_row(rng: random.Random, index: int, start: datetime) -> dict:
    topic = rng.choice(DEFAULT_TOPICS)
    text = make_text(rng, topic)
    followers = int(rng.lognormvariate(5.5, 1.6))
    band = rng.choices((0, 1, 2, 3), weights=(55, 15, 20, 10))[0]
    retweets = {
        0: 0,
        1: 1,
        2: rng.randint(2, 20),
        3: rng.randint(21, 2000),
    }[band]
    posted = start + timedelta(minutes=rng.randint(0, 7 * 24 * 60))
    return {
        "id": f"demo{index:06d}",
        "text": text,
        "created_at": posted.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "source_client": rng.choice(CLIENTS),
        "lang": "en",
        "is_retweet": False,
        "hashtag_count": text.count("#"),
        "mention_count": text.count("@"),
        "followers": followers,
        "following": int(rng.lognormvariate(5.0, 1.2)),
        "verified": rng.random() < 0.05,
        "retweet_count": retweets,
        "like_count": retweets * rng.randint(1, 8) + rng.randint(0, 30),
        "reply_count": rng.randint(0, max(2, retweets // 2)),
        "quote_count": rng.randint(0, max(1, retweets // 5)),
        "topic": topic,
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output", required=True, help="raw JSONL destination")
    parser.add_argument("--count", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    start = datetime(2022, 2, 1, tzinfo=timezone.utc)
    rows = [make_row(rng, i, start) for i in range(args.count)]

    # A few rows ingestion should drop, so the walkthrough shows filtering.
    duplicate = dict(rows[0])
    foreign = make_row(rng, args.count, start)
    foreign["lang"] = "de"
    repost = make_row(rng, args.count + 1, start)
    repost["is_retweet"] = True
    rows.extend([duplicate, foreign, repost])

    with open(args.output, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row) + "\n")
    print(f"wrote {len(rows)} raw rows to {args.output} "
          f"({args.count} expected to survive ingestion)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
