"""Experiment configuration: frozen dataclasses loadable from YAML."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import yaml

from .errors import ConfigError
from .features import ALL_FEATURES, validate_feature_names


@dataclass(frozen=True)
class DataConfig:
    seed: int = 13
    parse_text_counts: bool = True
    topics: Optional[tuple] = None
    require_english: bool = True
    require_original: bool = True


@dataclass(frozen=True)
class ModelConfig:
    """Architecture knobs. ``features`` lists the enabled input channels in
    serialization order; dropping "sentiment" removes that branch entirely,
    and an empty tuple leaves a text-only model."""

    backbone: str = "toy-random"
    backbone_options: dict = field(default_factory=dict)
    features: tuple = ALL_FEATURES
    dropout: float = 0.1
    num_classes: int = 4
    classifier_depth: int = 1

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        validate_feature_names(self.features)
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.num_classes < 2:
            raise ConfigError(f"num_classes must be >= 2, got {self.num_classes}")
        if self.classifier_depth < 1:
            raise ConfigError(f"classifier_depth must be >= 1, got {self.classifier_depth}")

    @property
    def use_sentiment(self) -> bool:
        return "sentiment" in self.features

    @property
    def numeric_features(self) -> tuple:
        return tuple(f for f in self.features if f != "sentiment")


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 13
    batch_size: int = 32
    max_epochs: int = 10
    patience: int = 3
    encoder_lr: float = 2e-5
    head_lr: float = 1e-3
    weight_decay: float = 0.01
    focal_beta: float = 0.9999
    focal_gamma: float = 2.0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.patience < 1:
            raise ConfigError(f"patience must be >= 1, got {self.patience}")
        if self.encoder_lr <= 0 or self.head_lr <= 0:
            raise ConfigError("learning rates must be positive")
        if not 0.0 <= self.focal_beta < 1.0:
            raise ConfigError(f"focal_beta must be in [0, 1), got {self.focal_beta}")
        if self.focal_gamma < 0:
            raise ConfigError(f"focal_gamma must be >= 0, got {self.focal_gamma}")


@dataclass(frozen=True)
class ExperimentConfig:
    data: DataConfig = field(default_factory=DataConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)


_TUPLE_KEYS = {"features", "topics"}
_SECTIONS = {"data": DataConfig, "model": ModelConfig, "train": TrainConfig}


def _build_section(cls, payload: dict, where: str):
    if not isinstance(payload, dict):
        raise ConfigError(f"section {where!r} must be a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(payload) - known)
    if unknown:
        raise ConfigError(f"unknown {where} keys: {unknown}")
    cleaned = {
        key: tuple(value) if key in _TUPLE_KEYS and value is not None else value
        for key, value in payload.items()
    }
    try:
        return cls(**cleaned)
    except TypeError as exc:
        raise ConfigError(f"bad {where} section: {exc}") from exc


def config_from_dict(payload: dict) -> ExperimentConfig:
    if not isinstance(payload, dict):
        raise ConfigError("config root must be a mapping")
    unknown = sorted(set(payload) - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown config sections: {unknown}")
    sections = {
        name: _build_section(cls, payload.get(name, {}), name)
        for name, cls in _SECTIONS.items()
    }
    return ExperimentConfig(**sections)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as handle:
        payload = yaml.safe_load(handle)
    return config_from_dict(payload or {})


def config_to_dict(config: ExperimentConfig) -> dict:
    payload = dataclasses.asdict(config)
    for section in payload.values():
        for key in _TUPLE_KEYS & set(section):
            if section[key] is not None:
                section[key] = list(section[key])
    return payload
