"""Tweet virality prediction: data pipeline, fused text+numeric classifier,
baselines, and feature ablations."""

from .config import DataConfig, ExperimentConfig, ModelConfig, TrainConfig, load_config
from .corpus import (
    BAND_NAMES,
    NUM_CLASSES,
    DatasetSplit,
    IngestFilters,
    TweetRecord,
    assign_virality_class,
    load_tweet_records,
    rebalance_zero_class,
    split_dataset,
)
from .encoders import EncodedBatch, EncoderBundle, build_encoder, register_backbone
from .errors import CheckpointError, ConfigError, CorpusValidationError, DivergenceError
from .evaluation import (
    REFERENCE_ABLATION,
    REFERENCE_RESULTS,
    RESULTS_NOTE,
    MetricReport,
    confusion_matrix,
    evaluate_predictions,
    metrics_from_confusion,
)
from .features import ALL_FEATURES, NUMERIC_FEATURES, MinMaxScaler
from .harness import (
    LoadedCheckpoint,
    load_checkpoint,
    predict_records,
    prepare_corpus,
    run_ablations,
    run_baselines,
    save_checkpoint,
    train_and_evaluate,
)
from .losses import ClassBalancedFocalLoss, effective_number_weights
from .model import ViralityClassifier
from .training import TrainHistory, shuffled_order, train_model

__version__ = "0.1.0"

__all__ = [
    "ALL_FEATURES",
    "BAND_NAMES",
    "CheckpointError",
    "ClassBalancedFocalLoss",
    "ConfigError",
    "CorpusValidationError",
    "DataConfig",
    "DatasetSplit",
    "DivergenceError",
    "EncodedBatch",
    "EncoderBundle",
    "ExperimentConfig",
    "IngestFilters",
    "LoadedCheckpoint",
    "MetricReport",
    "MinMaxScaler",
    "ModelConfig",
    "NUMERIC_FEATURES",
    "NUM_CLASSES",
    "REFERENCE_ABLATION",
    "REFERENCE_RESULTS",
    "RESULTS_NOTE",
    "TrainConfig",
    "TrainHistory",
    "TweetRecord",
    "ViralityClassifier",
    "assign_virality_class",
    "build_encoder",
    "confusion_matrix",
    "effective_number_weights",
    "evaluate_predictions",
    "load_checkpoint",
    "load_config",
    "load_tweet_records",
    "metrics_from_confusion",
    "predict_records",
    "prepare_corpus",
    "rebalance_zero_class",
    "register_backbone",
    "run_ablations",
    "run_baselines",
    "save_checkpoint",
    "shuffled_order",
    "split_dataset",
    "train_and_evaluate",
    "train_model",
]
