"""Corpus ingestion, banding, rebalancing, and split tests."""

from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synth import make_record, mixed_band_records, raw_dict, write_jsonl
from tweetvirality.corpus import (
    IngestFilters,
    assign_virality_class,
    class_counts,
    corpus_statistics,
    load_tweet_records,
    rebalance_zero_class,
    split_dataset,
)
from tweetvirality.errors import CorpusValidationError


class TestBanding:
    def test_band_boundaries(self):
        assert assign_virality_class(0) == 0
        assert assign_virality_class(1) == 1
        assert assign_virality_class(2) == 2
        assert assign_virality_class(20) == 2
        assert assign_virality_class(21) == 3
        assert assign_virality_class(500000) == 3

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError, match=">= 0"):
            assign_virality_class(-1)

    def test_surjective_on_band_openers(self):
        assert [assign_virality_class(c) for c in (0, 1, 2, 21)] == [0, 1, 2, 3]

    @given(st.integers(min_value=0, max_value=10**12))
    def test_total_and_in_range(self, count):
        assert assign_virality_class(count) in (0, 1, 2, 3)

    @given(
        st.integers(min_value=0, max_value=10**6),
        st.integers(min_value=0, max_value=10**6),
    )
    def test_monotone(self, a, b):
        low, high = min(a, b), max(a, b)
        assert assign_virality_class(low) <= assign_virality_class(high)


class TestLoadRecords:
    def test_loads_valid_lines(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [raw_dict(0), raw_dict(1, retweet_count=7)])
        records = load_tweet_records(path)
        assert [r.id for r in records] == ["t0", "t1"]
        assert records[1].retweet_count == 7

    def test_duplicate_ids_keep_first(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [raw_dict(0, text="first"), raw_dict(0, text="second")])
        records = load_tweet_records(path)
        assert len(records) == 1
        assert records[0].text == "first"

    def test_empty_file_and_blank_lines(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text("\n\n")
        assert load_tweet_records(path) == []

    def test_missing_field_names_line_and_field(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        row = raw_dict(0)
        del row["retweet_count"]
        write_jsonl(path, [raw_dict(1), row])
        with pytest.raises(CorpusValidationError) as err:
            load_tweet_records(path)
        (entry,) = err.value.errors
        assert entry.line == 2
        assert entry.field == "retweet_count"

    def test_bad_values_collected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        rows = [
            raw_dict(0, retweet_count=-1),
            raw_dict(1, verified="yes"),
            raw_dict(2, text="   "),
            raw_dict(3, followers=1.5),
        ]
        write_jsonl(path, rows)
        with pytest.raises(CorpusValidationError) as err:
            load_tweet_records(path)
        fields = {(e.line, e.field) for e in err.value.errors}
        assert fields == {(1, "retweet_count"), (2, "verified"), (3, "text"), (4, "followers")}

    def test_malformed_json_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(json.dumps(raw_dict(0)) + "\n{not json\n")
        with pytest.raises(CorpusValidationError) as err:
            load_tweet_records(path)
        assert err.value.errors[0].line == 2

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_tweet_records(tmp_path / "absent.jsonl")

    def test_language_and_retweet_filters(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        rows = [
            raw_dict(0, lang="en"),
            raw_dict(1, lang="fr"),
            raw_dict(2, is_retweet=True),
            raw_dict(3),  # no lang key: passes
        ]
        write_jsonl(path, rows)
        records = load_tweet_records(path, IngestFilters())
        assert [r.id for r in records] == ["t0", "t3"]
        everything = load_tweet_records(
            path, IngestFilters(require_english=False, require_original=False)
        )
        assert len(everything) == 4

    def test_topic_filter_and_unknown_topic(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        row_without_topic = raw_dict(2)
        del row_without_topic["topic"]
        write_jsonl(path, [raw_dict(0, topic="pets"), raw_dict(1, topic="kpop"), row_without_topic])
        records = load_tweet_records(path)
        assert records[2].topic == "unknown"
        filtered = load_tweet_records(path, IngestFilters(topics=("pets",)))
        assert [r.id for r in filtered] == ["t0"]


class TestRebalance:
    def test_downsamples_zero_class(self):
        records = [make_record(i, retweet_count=0) for i in range(10)]
        records += [make_record(10 + i, retweet_count=i + 1) for i in range(4)]
        out = rebalance_zero_class(records, seed=1)
        counts = class_counts(out)
        assert counts[0] == 4
        assert sum(counts[1:]) == 4
        assert {r.id for r in out if r.retweet_count > 0} == {f"t{10 + i}" for i in range(4)}

    def test_smaller_zero_class_unchanged(self):
        records = [make_record(i, retweet_count=0) for i in range(3)]
        records += [make_record(3 + i, retweet_count=2) for i in range(5)]
        assert rebalance_zero_class(records, seed=0) == records

    def test_deterministic_and_seed_sensitive(self):
        records = [make_record(i, retweet_count=0) for i in range(40)]
        records += [make_record(40 + i, retweet_count=1) for i in range(5)]
        first = [r.id for r in rebalance_zero_class(records, seed=9)]
        again = [r.id for r in rebalance_zero_class(records, seed=9)]
        other = [r.id for r in rebalance_zero_class(records, seed=10)]
        assert first == again
        assert first != other

    def test_preserves_order_and_contents(self):
        records = mixed_band_records(80, seed=3)
        out = rebalance_zero_class(records, seed=3)
        positions = {r.id: i for i, r in enumerate(records)}
        assert [positions[r.id] for r in out] == sorted(positions[r.id] for r in out)
        assert all(r is records[positions[r.id]] for r in out)

    @given(st.integers(min_value=0, max_value=60), st.integers(min_value=0, max_value=30),
           st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_equality_property(self, zeros, nonzeros, seed):
        records = [make_record(i, retweet_count=0) for i in range(zeros)]
        records += [make_record(zeros + i, retweet_count=3) for i in range(nonzeros)]
        out = rebalance_zero_class(records, seed=seed)
        counts = class_counts(out)
        if zeros > nonzeros:
            assert counts[0] == nonzeros
        else:
            assert out == records


class TestSplit:
    def test_exact_ratio(self):
        split = split_dataset(mixed_band_records(100), seed=0)
        assert (len(split.train), len(split.validation), len(split.test)) == (80, 10, 10)

    def test_extra_record_goes_to_train(self):
        split = split_dataset(mixed_band_records(101), seed=0)
        assert (len(split.train), len(split.validation), len(split.test)) == (81, 10, 10)

    def test_minimum_size_enforced(self):
        with pytest.raises(ValueError, match="at least 10"):
            split_dataset(mixed_band_records(9), seed=0)

    def test_deterministic_per_seed(self):
        records = mixed_band_records(53, seed=2)
        a = split_dataset(records, seed=7)
        b = split_dataset(records, seed=7)
        c = split_dataset(records, seed=8)
        assert [r.id for r in a.train] == [r.id for r in b.train]
        assert [r.id for r in a.test] == [r.id for r in b.test]
        assert {r.id for r in a.test} != {r.id for r in c.test}

    @given(st.integers(min_value=10, max_value=400), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_partition_and_ratio_bounds(self, n, seed):
        records = [make_record(i) for i in range(n)]
        split = split_dataset(records, seed=seed)
        parts = (split.train, split.validation, split.test)
        ids = [r.id for part in parts for r in part]
        assert len(ids) == n
        assert len(set(ids)) == n
        assert set(ids) == {r.id for r in records}
        for part, ratio in zip(parts, (0.8, 0.1, 0.1)):
            assert abs(len(part) - ratio * n) <= 1


class TestStatistics:
    def test_counts(self):
        records = [
            make_record(0, retweet_count=0, topic="pets"),
            make_record(1, retweet_count=1, topic="pets"),
            make_record(2, retweet_count=30, topic="kpop"),
        ]
        stats = corpus_statistics(records)
        assert stats["total"] == 3
        assert stats["per_topic"] == {"kpop": 1, "pets": 2}
        assert stats["per_class"] == {"0": 1, "1": 1, "2-20": 0, "21+": 1}


def test_rebalance_uses_uniform_sampling_without_replacement():
    # Spot-check the sampling call is the stdlib uniform draw: the kept set
    # must match random.Random(seed).sample over zero positions.
    records = [make_record(i, retweet_count=0) for i in range(12)]
    records += [make_record(12 + i, retweet_count=1) for i in range(5)]
    out = rebalance_zero_class(records, seed=42)
    expected_positions = set(random.Random(42).sample(range(12), 5))
    kept_zero_ids = {r.id for r in out if r.retweet_count == 0}
    assert kept_zero_ids == {f"t{i}" for i in expected_positions}
