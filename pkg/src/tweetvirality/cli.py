"""Command line interface for the virality pipeline."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .baselines import BASELINE_KINDS
from .config import ExperimentConfig, config_to_dict, load_config
from .corpus import (
    IngestFilters,
    corpus_statistics,
    load_tweet_records,
    write_records,
)
from .errors import CheckpointError, ConfigError, CorpusValidationError
from .evaluation import format_results_table
from .losses import effective_number_weights
from .harness import (
    evaluate_split,
    load_checkpoint,
    load_prepared,
    predict_records,
    prepare_corpus,
    run_ablations,
    run_baselines,
    run_metadata,
    save_checkpoint,
    save_prepared,
    train_and_evaluate,
    write_json,
)

_USER_ERRORS = (ConfigError, CorpusValidationError, CheckpointError, OSError, ValueError)


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="YAML experiment config")
    parser.add_argument("--seed", type=int, default=None, help="override every seed")
    parser.add_argument("--max-epochs", type=int, default=None)
    parser.add_argument("--backbone", default=None, help="registered backbone name")
    parser.add_argument(
        "--feature-order",
        default=None,
        help="comma-separated enabled features in serialization order",
    )


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    data, model, train = config.data, config.model, config.train
    if getattr(args, "seed", None) is not None:
        data = dataclasses.replace(data, seed=args.seed)
        train = dataclasses.replace(train, seed=args.seed)
    if getattr(args, "max_epochs", None) is not None:
        train = dataclasses.replace(train, max_epochs=args.max_epochs)
    if getattr(args, "backbone", None) is not None:
        model = dataclasses.replace(model, backbone=args.backbone)
    if getattr(args, "feature_order", None) is not None:
        names = tuple(n for n in args.feature_order.split(",") if n)
        model = dataclasses.replace(model, features=names)
    return ExperimentConfig(data=data, model=model, train=train)


def _cmd_ingest(args) -> int:
    filters = IngestFilters(
        topics=tuple(args.topics.split(",")) if args.topics else None,
        require_english=not args.allow_any_language,
        require_original=not args.allow_retweets,
    )
    records = load_tweet_records(args.input, filters)
    write_records(args.output, records)
    stats = corpus_statistics(records)
    if args.stats:
        write_json(args.stats, stats)
    print(f"{stats['total']} records retained -> {args.output}")
    print(f"class counts: {stats['per_class']}")
    print(f"topic counts: {stats['per_topic']}")
    return 0


def _cmd_prepare(args) -> int:
    config = _resolve_config(args)
    records = load_tweet_records(args.input)
    split = prepare_corpus(records, config.data)
    manifest = save_prepared(args.output_dir, split)
    for name, info in manifest["splits"].items():
        print(f"{name}: {info['size']} records, class counts {info['class_counts']}")
    return 0


def _cmd_train(args) -> int:
    config = _resolve_config(args)
    split = load_prepared(args.data_dir)
    result = train_and_evaluate(split, config)
    out = Path(args.run_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = run_metadata(config)
    weights = effective_number_weights(result.class_counts, config.train.focal_beta)
    save_checkpoint(out / "checkpoint.pt", result)
    write_json(
        out / "history.json",
        {**result.history.to_dict(), **meta, "loss_class_weights": weights.tolist()},
    )
    write_json(out / "test_report.json", {**result.report.to_dict(), **meta})
    write_json(out / "config.json", config_to_dict(config))
    print(
        f"best epoch {result.history.best_epoch} "
        f"(val macro F1 {result.history.best_val_macro_f1:.4f})"
    )
    print(format_results_table({"fused": result.report}))
    print(f"artifacts written to {out}")
    return 0


def _cmd_evaluate(args) -> int:
    loaded = load_checkpoint(args.checkpoint)
    split = load_prepared(args.data_dir)
    report = evaluate_split(split, loaded.config, loaded.model, loaded.bundle, part=args.split)
    if args.output:
        write_json(args.output, {**report.to_dict(), **run_metadata(loaded.config)})
    print(format_results_table({f"fused[{args.split}]": report}))
    return 0


def _cmd_baselines(args) -> int:
    config = _resolve_config(args)
    split = load_prepared(args.data_dir)
    kinds = args.kinds.split(",") if args.kinds else list(BASELINE_KINDS)
    unknown = sorted(set(kinds) - set(BASELINE_KINDS))
    if unknown:
        raise ConfigError(f"unknown baseline kinds: {unknown}")
    results = run_baselines(split, config, kinds)
    print(format_results_table({k: r.report for k, r in results.items()}))
    degenerate = [k for k, r in results.items() if r.degenerate]
    if degenerate:
        print(f"single-class training split; constant predictors: {degenerate}")
    if args.output:
        payload = {
            k: {**r.report.to_dict(), "degenerate": r.degenerate}
            for k, r in results.items()
        }
        write_json(args.output, {**payload, "metadata": run_metadata(config)})
    return 0


def _cmd_ablate(args) -> int:
    config = _resolve_config(args)
    split = load_prepared(args.data_dir)
    result = run_ablations(split, config)
    summary = result.summary()
    print(format_results_table({"full": result.full.report}))
    print(f"{'removed':<14} {'macro_f1':>9} {'accuracy':>9} {'delta_f1':>9}")
    for name, entry in summary["removed"].items():
        print(
            f"{name:<14} {entry['macro_f1']:>9.4f} {entry['accuracy']:>9.4f} "
            f"{entry['macro_f1_delta_vs_full']:>+9.4f}"
        )
    if args.output:
        payload = {
            "full": {**result.full.report.to_dict(), "metadata": run_metadata(config)},
            "removed": {
                name: {
                    "report": entry.report.to_dict(),
                    "macro_f1_delta_vs_full": summary["removed"][name]["macro_f1_delta_vs_full"],
                    "metadata": run_metadata(
                        dataclasses.replace(
                            config,
                            model=dataclasses.replace(config.model, features=entry.features),
                        ),
                        ablated=name,
                    ),
                }
                for name, entry in result.removals.items()
            },
        }
        write_json(args.output, payload)
    return 0


def _cmd_predict(args) -> int:
    loaded = load_checkpoint(args.checkpoint)
    records = load_tweet_records(args.input)
    rows = predict_records(loaded.bundle, loaded.model, records, loaded.config)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            for row in rows:
                handle.write(json.dumps(row) + "\n")
        print(f"wrote {len(rows)} predictions to {args.output}")
    else:
        for row in rows:
            print(json.dumps(row))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tweetvirality",
        description="Four-band tweet virality prediction: data pipeline, fused "
        "text+numeric model, baselines, and feature ablations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate raw JSONL, filter, dedup, write a corpus")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--stats", type=Path, default=None, help="also write corpus statistics JSON")
    p.add_argument("--topics", default=None, help="comma-separated topic allowlist")
    p.add_argument("--allow-any-language", action="store_true")
    p.add_argument("--allow-retweets", action="store_true")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("prepare", help="rebalance the zero band and split 80:10:10")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output-dir", type=Path, required=True)
    _add_config_args(p)
    p.set_defaults(func=_cmd_prepare)

    p = sub.add_parser("train", help="train the fused classifier on a prepared dataset")
    p.add_argument("--data-dir", type=Path, required=True)
    p.add_argument("--run-dir", type=Path, required=True, help="artifact output directory")
    _add_config_args(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a checkpoint on a prepared split")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--data-dir", type=Path, required=True)
    p.add_argument("--split", choices=("train", "validation", "test"), default="test")
    p.add_argument("--output", type=Path, default=None)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("baselines", help="train and score the baseline suite")
    p.add_argument("--data-dir", type=Path, required=True)
    p.add_argument("--kinds", default=None, help=f"comma-separated subset of {list(BASELINE_KINDS)}")
    p.add_argument("--output", type=Path, default=None)
    _add_config_args(p)
    p.set_defaults(func=_cmd_baselines)

    p = sub.add_parser("ablate", help="retrain once per removed feature and compare")
    p.add_argument("--data-dir", type=Path, required=True)
    p.add_argument("--output", type=Path, default=None)
    _add_config_args(p)
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("predict", help="classify new records with a saved checkpoint")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, default=None, help="JSONL output (default stdout)")
    p.set_defaults(func=_cmd_predict)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
