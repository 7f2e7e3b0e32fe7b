"""CLI tests driving every subcommand in-process through main()."""

from __future__ import annotations

import json

import pytest

from synth import mixed_band_records, raw_dict, write_jsonl
from tweetvirality.cli import main
from tweetvirality.config import load_config
from tweetvirality.harness import load_prepared

CONFIG_YAML = """\
model:
  backbone: toy-random
  backbone_options:
    vocab_size: 512
    max_length: 32
    hidden_size: 16
    num_layers: 1
    num_heads: 2
    ffn_size: 32
train:
  seed: 11
  batch_size: 16
  max_epochs: 2
  patience: 2
"""


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Raw corpus ingested and prepared once; training runs reuse it."""
    root = tmp_path_factory.mktemp("cli")
    rows = [r.to_dict() for r in mixed_band_records(70, seed=4)]
    rows.append(dict(rows[0]))  # duplicate id, dropped by ingest
    rows.append(raw_dict(900, lang="fr"))
    rows.append(raw_dict(901, is_retweet=True))
    write_jsonl(root / "raw.jsonl", rows)
    (root / "config.yaml").write_text(CONFIG_YAML, encoding="utf-8")

    assert main(["ingest", "--input", str(root / "raw.jsonl"),
                 "--output", str(root / "corpus.jsonl"),
                 "--stats", str(root / "stats.json")]) == 0
    assert main(["prepare", "--input", str(root / "corpus.jsonl"),
                 "--output-dir", str(root / "data"),
                 "--config", str(root / "config.yaml")]) == 0
    return root


@pytest.fixture(scope="module")
def run_dir(workspace):
    out = workspace / "run"
    code = main(["train", "--data-dir", str(workspace / "data"),
                 "--run-dir", str(out),
                 "--config", str(workspace / "config.yaml")])
    assert code == 0
    return out


class TestIngest:
    def test_filters_and_dedup(self, workspace, capsys):
        main(["ingest", "--input", str(workspace / "raw.jsonl"),
              "--output", str(workspace / "again.jsonl")])
        out = capsys.readouterr().out
        # 73 raw rows: one duplicate, one French, one retweet dropped.
        assert "70 records retained" in out
        assert "class counts" in out

    def test_stats_file(self, workspace):
        stats = json.loads((workspace / "stats.json").read_text())
        assert stats["total"] == 70
        assert sum(stats["per_class"].values()) == 70

    def test_allow_flags_keep_rows(self, workspace, tmp_path, capsys):
        main(["ingest", "--input", str(workspace / "raw.jsonl"),
              "--output", str(tmp_path / "all.jsonl"),
              "--allow-any-language", "--allow-retweets"])
        assert "72 records retained" in capsys.readouterr().out

    def test_invalid_input_fails_cleanly(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        write_jsonl(bad, [raw_dict(0, retweet_count=-3)])
        code = main(["ingest", "--input", str(bad),
                     "--output", str(tmp_path / "out.jsonl")])
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert "retweet_count" in err

    def test_missing_input_fails_cleanly(self, tmp_path, capsys):
        code = main(["ingest", "--input", str(tmp_path / "nope.jsonl"),
                     "--output", str(tmp_path / "out.jsonl")])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestPrepare:
    def test_writes_split_files_and_manifest(self, workspace):
        data = workspace / "data"
        for name in ("train.jsonl", "validation.jsonl", "test.jsonl", "manifest.json"):
            assert (data / name).exists()
        split = load_prepared(data)
        n = len(split.train) + len(split.validation) + len(split.test)
        assert abs(len(split.validation) - n / 10) <= 1
        assert abs(len(split.test) - n / 10) <= 1

    def test_prints_sizes(self, workspace, tmp_path, capsys):
        main(["prepare", "--input", str(workspace / "corpus.jsonl"),
              "--output-dir", str(tmp_path / "data"),
              "--config", str(workspace / "config.yaml")])
        out = capsys.readouterr().out
        assert "train:" in out and "validation:" in out and "test:" in out


class TestTrain:
    def test_artifacts_written(self, run_dir):
        for name in ("checkpoint.pt", "history.json", "test_report.json", "config.json"):
            assert (run_dir / name).exists()

    def test_history_payload(self, run_dir):
        history = json.loads((run_dir / "history.json").read_text())
        assert history["best_epoch"] >= 1
        assert len(history["epochs"]) >= 1
        assert len(history["loss_class_weights"]) == 4
        assert history["seed"] == 11
        assert history["ablated_feature"] is None
        assert len(history["config_hash"]) == 12
        for stats in history["epochs"]:
            assert set(stats) == {
                "epoch", "train_loss", "val_loss", "val_macro_f1",
                "val_accuracy", "seconds",
            }

    def test_config_snapshot_round_trips(self, run_dir, workspace):
        from tweetvirality.config import config_from_dict

        snapshot = config_from_dict(json.loads((run_dir / "config.json").read_text()))
        assert snapshot == load_config(workspace / "config.yaml")

    def test_reruns_are_identical_up_to_timing(self, workspace, run_dir):
        second = workspace / "run2"
        main(["train", "--data-dir", str(workspace / "data"),
              "--run-dir", str(second),
              "--config", str(workspace / "config.yaml")])
        assert (second / "test_report.json").read_bytes() == (
            run_dir / "test_report.json"
        ).read_bytes()
        assert (second / "config.json").read_bytes() == (
            run_dir / "config.json"
        ).read_bytes()

        def strip_timing(path):
            payload = json.loads(path.read_text())
            payload.pop("seconds")
            for stats in payload["epochs"]:
                stats.pop("seconds")
            return payload

        assert strip_timing(second / "history.json") == strip_timing(
            run_dir / "history.json"
        )

    def test_seed_override_applies_everywhere(self, workspace, tmp_path, capsys):
        out = tmp_path / "seeded"
        main(["train", "--data-dir", str(workspace / "data"),
              "--run-dir", str(out),
              "--config", str(workspace / "config.yaml"),
              "--seed", "77", "--max-epochs", "1"])
        snapshot = json.loads((out / "config.json").read_text())
        assert snapshot["data"]["seed"] == 77
        assert snapshot["train"]["seed"] == 77
        assert snapshot["train"]["max_epochs"] == 1

    def test_feature_order_override(self, workspace, tmp_path):
        out = tmp_path / "subset"
        main(["train", "--data-dir", str(workspace / "data"),
              "--run-dir", str(out),
              "--config", str(workspace / "config.yaml"),
              "--feature-order", "sentiment,followers", "--max-epochs", "1"])
        snapshot = json.loads((out / "config.json").read_text())
        assert snapshot["model"]["features"] == ["sentiment", "followers"]

    def test_unknown_feature_fails_cleanly(self, workspace, tmp_path, capsys):
        code = main(["train", "--data-dir", str(workspace / "data"),
                     "--run-dir", str(tmp_path / "x"),
                     "--config", str(workspace / "config.yaml"),
                     "--feature-order", "sentiment,virality"])
        assert code == 1
        assert "unknown" in capsys.readouterr().err


class TestEvaluate:
    def test_matches_training_report(self, workspace, run_dir, tmp_path, capsys):
        out = tmp_path / "eval.json"
        code = main(["evaluate", "--checkpoint", str(run_dir / "checkpoint.pt"),
                     "--data-dir", str(workspace / "data"),
                     "--output", str(out)])
        assert code == 0
        assert "fused[test]" in capsys.readouterr().out
        evaluated = json.loads(out.read_text())
        trained = json.loads((run_dir / "test_report.json").read_text())
        assert evaluated["confusion"] == trained["confusion"]
        assert evaluated["macro_f1"] == trained["macro_f1"]

    def test_other_splits_selectable(self, workspace, run_dir, capsys):
        code = main(["evaluate", "--checkpoint", str(run_dir / "checkpoint.pt"),
                     "--data-dir", str(workspace / "data"),
                     "--split", "validation"])
        assert code == 0
        assert "fused[validation]" in capsys.readouterr().out

    def test_bad_checkpoint_fails_cleanly(self, workspace, tmp_path, capsys):
        bad = tmp_path / "bad.pt"
        bad.write_bytes(b"junk")
        code = main(["evaluate", "--checkpoint", str(bad),
                     "--data-dir", str(workspace / "data")])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestBaselines:
    def test_subset_run_with_output(self, workspace, tmp_path, capsys):
        out = tmp_path / "baselines.json"
        code = main(["baselines", "--data-dir", str(workspace / "data"),
                     "--kinds", "decision_tree,random_forest",
                     "--config", str(workspace / "config.yaml"),
                     "--output", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "decision_tree" in stdout and "random_forest" in stdout
        payload = json.loads(out.read_text())
        assert set(payload) == {"decision_tree", "random_forest", "metadata"}
        assert payload["decision_tree"]["degenerate"] is False
        assert payload["metadata"]["seed"] == 11

    def test_unknown_kind_fails_cleanly(self, workspace, capsys):
        code = main(["baselines", "--data-dir", str(workspace / "data"),
                     "--kinds", "decision_tree,svm"])
        assert code == 1
        assert "unknown baseline kinds" in capsys.readouterr().err


class TestAblate:
    def test_full_sweep_writes_seven_entries(self, workspace, capsys, tmp_path):
        out = tmp_path / "ablation.json"
        code = main(["ablate", "--data-dir", str(workspace / "data"),
                     "--config", str(workspace / "config.yaml"),
                     "--max-epochs", "1",
                     "--output", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "removed" in stdout
        payload = json.loads(out.read_text())
        removed = payload["removed"]
        assert len(removed) == 7
        full_hash = payload["full"]["metadata"]["config_hash"]
        for name, entry in removed.items():
            assert entry["metadata"]["ablated_feature"] == name
            assert entry["metadata"]["config_hash"] != full_hash
            assert entry["macro_f1_delta_vs_full"] == pytest.approx(
                entry["report"]["macro_f1"] - payload["full"]["macro_f1"], abs=1e-12
            )


class TestPredict:
    def test_stdout_rows(self, workspace, run_dir, capsys):
        code = main(["predict", "--checkpoint", str(run_dir / "checkpoint.pt"),
                     "--input", str(workspace / "corpus.jsonl")])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 70
        row = json.loads(lines[0])
        assert set(row) == {"id", "predicted_class", "predicted_band", "probabilities"}
        assert sum(row["probabilities"]) == pytest.approx(1.0, abs=1e-5)

    def test_output_file(self, workspace, run_dir, tmp_path, capsys):
        out = tmp_path / "predictions.jsonl"
        code = main(["predict", "--checkpoint", str(run_dir / "checkpoint.pt"),
                     "--input", str(workspace / "corpus.jsonl"),
                     "--output", str(out)])
        assert code == 0
        assert "wrote 70 predictions" in capsys.readouterr().out
        assert len(out.read_text().strip().splitlines()) == 70
