"""Experiment orchestration: prepared datasets, training runs, baselines, ablations."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import torch

from .baselines import (
    BASELINE_KINDS,
    BaselineData,
    BaselineResult,
    loss_class_counts,
    run_baseline,
)
from .config import DataConfig, ExperimentConfig, ModelConfig, config_from_dict, config_to_dict
from .corpus import (
    DatasetSplit,
    TweetRecord,
    assign_virality_class,
    load_tweet_records,
    rebalance_zero_class,
    split_dataset,
    write_records,
)
from .encoders import EncodedBatch, EncoderBundle, build_encoder
from .errors import CheckpointError, ConfigError
from .evaluation import MetricReport, evaluate_predictions
from .features import MinMaxScaler, numeric_matrix
from .losses import ClassBalancedFocalLoss
from .model import ViralityClassifier
from .training import TrainHistory, evaluate_model, train_model

CHECKPOINT_VERSION = 1
SPLIT_FILES = {"train": "train.jsonl", "validation": "validation.jsonl", "test": "test.jsonl"}


def labels_for(records: Sequence[TweetRecord]) -> torch.Tensor:
    return torch.tensor(
        [assign_virality_class(r.retweet_count) for r in records], dtype=torch.long
    )


def prepare_corpus(records: Sequence[TweetRecord], data_config: DataConfig) -> DatasetSplit:
    """Rebalance the zero band, then split 80:10:10, both off one seed."""
    rebalanced = rebalance_zero_class(records, data_config.seed)
    return split_dataset(rebalanced, data_config.seed)


def save_prepared(directory, split: DatasetSplit) -> dict:
    """Write the three split files plus a manifest; returns the manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {"seed": split.seed, "splits": {}}
    for name, filename in SPLIT_FILES.items():
        records = getattr(split, name)
        write_records(directory / filename, records)
        manifest["splits"][name] = {
            "file": filename,
            "size": len(records),
            "class_counts": np.bincount(
                [assign_virality_class(r.retweet_count) for r in records], minlength=4
            ).tolist(),
        }
    write_json(directory / "manifest.json", manifest)
    return manifest


def load_prepared(directory) -> DatasetSplit:
    directory = Path(directory)
    with open(directory / "manifest.json", "r", encoding="utf-8") as handle:
        manifest = json.load(handle)
    parts = {
        name: load_tweet_records(directory / filename)
        for name, filename in SPLIT_FILES.items()
    }
    return DatasetSplit(
        train=parts["train"],
        validation=parts["validation"],
        test=parts["test"],
        seed=manifest["seed"],
    )


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def config_hash(config: ExperimentConfig) -> str:
    payload = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def run_metadata(config: ExperimentConfig, ablated: Optional[str] = None) -> dict:
    return {
        "seed": config.train.seed,
        "config_hash": config_hash(config),
        "ablated_feature": ablated,
    }


def build_model(model_config: ModelConfig, seed: int) -> tuple:
    """Deterministically construct the encoder bundle and fused classifier."""
    with torch.random.fork_rng():
        torch.manual_seed(seed)
        bundle = build_encoder(model_config.backbone, seed=seed, **model_config.backbone_options)
        model = ViralityClassifier(
            bundle.backbone,
            sentiment=bundle.sentiment if model_config.use_sentiment else None,
            num_classes=model_config.num_classes,
            dropout=model_config.dropout,
            hidden_layers=model_config.classifier_depth,
        )
    return bundle, model


def encode_records(
    bundle: EncoderBundle,
    records: Sequence[TweetRecord],
    model_config: ModelConfig,
    data_config: DataConfig,
) -> EncodedBatch:
    return bundle.featurizer.encode_records(
        records,
        features=model_config.numeric_features,
        parse_text_counts=data_config.parse_text_counts,
        with_sentiment=model_config.use_sentiment,
    )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    history: TrainHistory
    report: MetricReport
    model: ViralityClassifier
    bundle: EncoderBundle
    class_counts: list
    scaler: MinMaxScaler


def train_and_evaluate(split: DatasetSplit, config: ExperimentConfig) -> ExperimentResult:
    """Train the fused model on a prepared split and score the test part."""
    train_labels = labels_for(split.train)
    counts = loss_class_counts(train_labels.numpy(), config.model.num_classes)
    loss_fn = ClassBalancedFocalLoss(
        counts, beta=config.train.focal_beta, gamma=config.train.focal_gamma
    )
    bundle, model = build_model(config.model, config.train.seed)
    # The fused model reads raw integers through its token stream; the
    # scaler is fitted anyway so the checkpoint can pair with baselines.
    scaler = MinMaxScaler.fit(
        numeric_matrix(split.train, parse_text_counts=config.data.parse_text_counts)
    )
    encode = lambda recs: encode_records(bundle, recs, config.model, config.data)  # noqa: E731
    history = train_model(
        model,
        loss_fn,
        encode(split.train),
        train_labels,
        encode(split.validation),
        labels_for(split.validation),
        config.train,
    )
    report = evaluate_model(
        model, encode(split.test), labels_for(split.test), config.train.batch_size
    )
    return ExperimentResult(
        config=config,
        history=history,
        report=report,
        model=model,
        bundle=bundle,
        class_counts=counts,
        scaler=scaler,
    )


@dataclass
class LoadedCheckpoint:
    bundle: EncoderBundle
    model: ViralityClassifier
    config: ExperimentConfig
    class_counts: list
    scaler: MinMaxScaler


def save_checkpoint(path, result: ExperimentResult) -> None:
    torch.save(
        {
            "format_version": CHECKPOINT_VERSION,
            "config": config_to_dict(result.config),
            "class_counts": result.class_counts,
            "scaler": result.scaler.to_dict(),
            "state_dict": result.model.state_dict(),
        },
        path,
    )


def load_checkpoint(path) -> LoadedCheckpoint:
    """Rebuild the bundle, model, and config from a saved training run."""
    try:
        payload = torch.load(path, map_location="cpu")
    except Exception as exc:
        # torch.load failures span pickle, struct, and zipfile exceptions
        # depending on how the file is corrupt.
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format_version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"unrecognized checkpoint format in {path}")
    config = config_from_dict(payload["config"])
    bundle, model = build_model(config.model, config.train.seed)
    try:
        model.load_state_dict(payload["state_dict"])
    except (KeyError, RuntimeError) as exc:
        raise CheckpointError(f"checkpoint weights do not match the config: {exc}") from exc
    model.eval()
    return LoadedCheckpoint(
        bundle=bundle,
        model=model,
        config=config,
        class_counts=payload["class_counts"],
        scaler=MinMaxScaler.from_dict(payload["scaler"]),
    )


@torch.no_grad()
def sentiment_probabilities(
    bundle: EncoderBundle,
    records: Sequence[TweetRecord],
    batch_size: int = 32,
) -> np.ndarray:
    """(n, 3) sentiment distribution per record from the bundle's sentiment
    module, run without gradients."""
    bundle.sentiment.eval()
    batch = bundle.featurizer.encode_records(records, features=(), with_sentiment=True)
    rows = []
    for start in range(0, len(records), batch_size):
        part = batch.select(list(range(start, min(start + batch_size, len(records)))))
        rows.append(bundle.sentiment(part.sentiment_ids, part.sentiment_mask).numpy())
    return np.concatenate(rows, axis=0)


def build_baseline_data(split: DatasetSplit, config: ExperimentConfig) -> BaselineData:
    """Nine-column inputs for the numeric baselines: the six numeric
    features min-max scaled on train, then the three sentiment probabilities.

    The fused model never sees these scaled values; it reads the raw
    integers through its token stream.
    """
    parse = config.data.parse_text_counts
    matrices = {
        name: numeric_matrix(getattr(split, name), parse_text_counts=parse)
        for name in ("train", "validation", "test")
    }
    scaler = MinMaxScaler.fit(matrices["train"])
    bundle, _ = build_model(config.model, config.train.seed)
    parts = {}
    for name, matrix in matrices.items():
        records = getattr(split, name)
        probs = sentiment_probabilities(bundle, records, config.train.batch_size)
        parts[name] = np.concatenate([scaler.transform(matrix), probs], axis=1)
    return BaselineData(
        train_x=parts["train"],
        train_y=labels_for(split.train).numpy(),
        val_x=parts["validation"],
        val_y=labels_for(split.validation).numpy(),
        test_x=parts["test"],
        test_y=labels_for(split.test).numpy(),
        seed=config.train.seed,
        num_classes=config.model.num_classes,
    )


def run_baselines(
    split: DatasetSplit,
    config: ExperimentConfig,
    kinds: Sequence[str] = BASELINE_KINDS,
) -> dict:
    """Train and score the requested baselines on the split's test part."""
    results = {}
    numeric_kinds = [k for k in kinds if k != "text_only"]
    if numeric_kinds:
        data = build_baseline_data(split, config)
        for kind in numeric_kinds:
            results[kind] = run_baseline(kind, data, config.train)
    if "text_only" in kinds:
        text_config = dataclasses.replace(
            config, model=dataclasses.replace(config.model, features=())
        )
        outcome = train_and_evaluate(split, text_config)
        results["text_only"] = BaselineResult(
            kind="text_only", report=outcome.report, history=outcome.history
        )
    return results


@dataclass
class AblationEntry:
    removed: str
    features: tuple
    report: MetricReport
    history: TrainHistory

    def summary(self, full: MetricReport) -> dict:
        return {
            "removed": self.removed,
            "macro_f1": self.report.macro_f1,
            "accuracy": self.report.accuracy,
            "macro_f1_delta_vs_full": self.report.macro_f1 - full.macro_f1,
        }


@dataclass
class AblationResult:
    full: ExperimentResult
    removals: dict

    def summary(self) -> dict:
        return {
            "full": {
                "macro_f1": self.full.report.macro_f1,
                "accuracy": self.full.report.accuracy,
            },
            "removed": {
                name: entry.summary(self.full.report)
                for name, entry in self.removals.items()
            },
        }


def ablation_run(
    split: DatasetSplit, config: ExperimentConfig, feature: Optional[str]
) -> ExperimentResult:
    """One from-scratch training run with ``feature`` removed (None trains
    the unmodified base model). Only the feature tuple differs from base."""
    if feature is None:
        return train_and_evaluate(split, config)
    if feature not in config.model.features:
        raise ConfigError(
            f"cannot ablate {feature!r}; enabled features are {list(config.model.features)}"
        )
    reduced = tuple(f for f in config.model.features if f != feature)
    variant = dataclasses.replace(
        config, model=dataclasses.replace(config.model, features=reduced)
    )
    return train_and_evaluate(split, variant)


def run_ablations(split: DatasetSplit, config: ExperimentConfig) -> AblationResult:
    """Retrain the fused model once per removed feature, plus the full model.

    Every run starts from scratch with the same seeds.
    """
    full = ablation_run(split, config, None)
    removals = {}
    for feature in config.model.features:
        outcome = ablation_run(split, config, feature)
        removals[feature] = AblationEntry(
            removed=feature,
            features=outcome.config.model.features,
            report=outcome.report,
            history=outcome.history,
        )
    return AblationResult(full=full, removals=removals)


def predict_records(
    bundle: EncoderBundle,
    model: ViralityClassifier,
    records: Sequence[TweetRecord],
    config: ExperimentConfig,
    batch_size: Optional[int] = None,
) -> list:
    """Per-record predictions: class index, band name, class probabilities."""
    from .corpus import BAND_NAMES

    batch_size = batch_size or config.train.batch_size
    batch = encode_records(bundle, records, config.model, config.data)
    outputs = []
    model.eval()
    for start in range(0, len(records), batch_size):
        part = batch.select(list(range(start, min(start + batch_size, len(records)))))
        probs = model.predict_proba(part)
        for row, record in zip(probs, records[start : start + batch_size]):
            label = int(row.argmax())
            outputs.append(
                {
                    "id": record.id,
                    "predicted_class": label,
                    "predicted_band": BAND_NAMES[label],
                    "probabilities": [float(p) for p in row],
                }
            )
    return outputs


def evaluate_split(
    split: DatasetSplit, config: ExperimentConfig, model: ViralityClassifier,
    bundle: EncoderBundle, part: str = "test"
) -> MetricReport:
    records = getattr(split, part)
    batch = encode_records(bundle, records, config.model, config.data)
    predictions = []
    model.eval()
    with torch.no_grad():
        for start in range(0, len(records), config.train.batch_size):
            sub = batch.select(list(range(start, min(start + config.train.batch_size, len(records)))))
            predictions.extend(model(sub).argmax(dim=-1).tolist())
    return evaluate_predictions(labels_for(records).tolist(), predictions, config.model.num_classes)
