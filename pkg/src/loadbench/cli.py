"""Command-line pipeline.

Subcommands: synth, curate, correlate, train, evaluate, report,
plot-predictions, eval-external. Experiments are described by a single
YAML config (keys: dataset, curation, window, model, train, metrics,
output, seed); command-line flags override file values. Every failure
exits nonzero after printing one JSON line with a machine-parsable
error code to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import yaml

from . import report as reporting
from .curation import (
    CurationSpec,
    correlation_report,
    curate,
    heterogeneity_report,
    select_features,
)
from .data import (
    BuildingRecord,
    NormStats,
    SplitSpec,
    WindowSet,
    WindowSpec,
    apply_normalizer,
    denormalize_loads,
    fit_normalizer,
    ingest,
    split,
    write_dataset_csv,
)
from .errors import (
    BadIndex,
    BadValue,
    ConfigError,
    LoadBenchError,
    MissingStaticFeatures,
    RunLocked,
)
from .metrics import MetricConfig, nmae, nmse
from .models import build, load_checkpoint, save_checkpoint
from .synth import SynthSpec, generate
from .training import (
    DEFAULT_LR_GRID,
    TrainConfig,
    evaluate,
    grid_search,
    predict,
    train,
)

log = logging.getLogger(__name__)

LOCK_NAME = ".loadbench.lock"


# --------------------------------------------------------------------------
# run-directory lock
# --------------------------------------------------------------------------

@contextlib.contextmanager
def run_lock(directory):
    """Sentinel-file lock so two processes cannot write one run directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / LOCK_NAME
    try:
        fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RunLocked(
            f"{directory} is locked by {path}; remove the file if no other "
            "process is writing this run"
        ) from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield directory
    finally:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(path)


# --------------------------------------------------------------------------
# config handling
# --------------------------------------------------------------------------

_OPTIONAL_NONE = object()

_SCHEMA = {
    "seed": int,
    "dataset": {
        "name": str,
        "timeseries": str,
        "static": str,
        "scope": str,
    },
    "curation": {
        "count": int,
        "mode": str,
        "building_type": str,
        "seed": int,
    },
    "window": {"lookback": int, "lookahead": int},
    "model": {"arch": str, "hyperparameters": dict},
    "train": {
        "max_epochs": int,
        "batch_size": int,
        "patience": int,
        "learning_rate": float,
        "grid": bool,
        "lr_grid": list,
        "optimizer": str,
        "grad_clip": float,
        "candidate_epochs": int,
    },
    "metrics": {"space": str},
    "output": {"dir": str},
}

# fields where YAML null is a meaningful value, not a mistake
_NULLABLE = {"train.grad_clip", "train.candidate_epochs"}


def _check_fields(node, schema, prefix=""):
    if not isinstance(node, dict):
        raise ConfigError(f"{prefix or 'config'}: expected a mapping")
    for key, value in node.items():
        path = f"{prefix}{key}"
        if key not in schema:
            raise ConfigError(f"{path}: unknown field")
        expected = schema[key]
        if isinstance(expected, dict):
            _check_fields(value, expected, prefix=f"{path}.")
            continue
        if value is None:
            if path in _NULLABLE:
                continue
            raise ConfigError(f"{path}: null is not a valid value")
        if isinstance(value, bool) and expected is not bool:
            raise ConfigError(f"{path}: expected {expected.__name__}, got bool")
        if expected is float and isinstance(value, int):
            continue
        if not isinstance(value, expected):
            raise ConfigError(
                f"{path}: expected {expected.__name__}, "
                f"got {type(value).__name__}"
            )


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from None
    if cfg is None:
        cfg = {}
    _check_fields(cfg, _SCHEMA)
    return cfg


def _get(cfg: dict, path: str, default=_OPTIONAL_NONE):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if default is _OPTIONAL_NONE:
                raise ConfigError(f"{path}: required field is missing")
            return default
        node = node[part]
    return node


def _merge_config(args) -> dict:
    """File config (if any) with flag overrides layered on top."""
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    overrides = {
        "seed": ("seed",),
        "timeseries": ("dataset", "timeseries"),
        "static": ("dataset", "static"),
        "dataset_name": ("dataset", "name"),
        "scope": ("dataset", "scope"),
        "lookback": ("window", "lookback"),
        "lookahead": ("window", "lookahead"),
        "arch": ("model", "arch"),
        "lr": ("train", "learning_rate"),
        "max_epochs": ("train", "max_epochs"),
        "batch_size": ("train", "batch_size"),
        "patience": ("train", "patience"),
        "grid": ("train", "grid"),
        "space": ("metrics", "space"),
        "out_dir": ("output", "dir"),
        "count": ("curation", "count"),
        "mode": ("curation", "mode"),
        "building_type": ("curation", "building_type"),
        "curation_seed": ("curation", "seed"),
    }
    for attr, keys in overrides.items():
        value = getattr(args, attr, None)
        if value is None:
            continue
        node = cfg
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = value
    _check_fields(cfg, _SCHEMA)
    return cfg


# --------------------------------------------------------------------------
# pipeline helpers
# --------------------------------------------------------------------------

def _load_records(cfg) -> list[BuildingRecord]:
    ts_path = _get(cfg, "dataset.timeseries")
    static_path = _get(cfg, "dataset.static")
    if not os.path.exists(ts_path):
        raise ConfigError(f"dataset.timeseries: file not found: {ts_path}")
    if not os.path.exists(static_path):
        raise MissingStaticFeatures(f"static file not found: {static_path}")
    return ingest(ts_path, static_path)


def _dataset_name(cfg) -> str:
    name = _get(cfg, "dataset.name", None)
    if name:
        return name
    return Path(_get(cfg, "dataset.timeseries")).stem


def _curation_spec(cfg) -> CurationSpec | None:
    section = cfg.get("curation")
    if not section:
        return None
    return CurationSpec(
        target_count=_get(cfg, "curation.count"),
        mode=_get(cfg, "curation.mode", "heterogeneous"),
        building_type=_get(cfg, "curation.building_type", "Warehouse"),
        random_seed=_get(cfg, "curation.seed", _get(cfg, "seed", 0)),
    )


def _window_spec(cfg) -> WindowSpec:
    return WindowSpec(
        lookback=_get(cfg, "window.lookback", 512),
        lookahead=_get(cfg, "window.lookahead", 96),
    )


def _prepare_sets(records, window: WindowSpec, scope: str):
    """Split every building, fit the normalizer on train, window all splits.

    Returns (stats, normalized train/val/test WindowSets, raw test WindowSet).
    Raw and normalized test sets share segment order, so window enumeration
    lines up one-to-one.
    """
    splits = [split(rec, SplitSpec()) for rec in records]
    train_segs = [s[0] for s in splits]
    stats = fit_normalizer(train_segs, scope=scope)
    norm = [
        [apply_normalizer(seg, stats) for seg in (tr, va, te)]
        for tr, va, te in splits
    ]
    train_set = WindowSet([n[0] for n in norm], window)
    val_set = WindowSet([n[1] for n in norm], window)
    test_set = WindowSet([n[2] for n in norm], window)
    raw_test = WindowSet([s[2] for s in splits], window)
    return stats, train_set, val_set, test_set, raw_test


def _denormalized_predictions(
    preds: np.ndarray, window_set: WindowSet, stats: NormStats
) -> np.ndarray:
    out = np.empty_like(preds)
    for seg_index, seg in enumerate(window_set.segments):
        lo, hi = window_set.segment_bounds(seg_index)
        out[lo:hi] = denormalize_loads(preds[lo:hi], stats, seg.building_id)
    return out


def _score(preds: np.ndarray, targets: np.ndarray, sigma: float) -> dict:
    cfg = MetricConfig(sigma_y=sigma)
    return {"nmse": nmse(preds, targets, cfg), "nmae": nmae(preds, targets, cfg)}


def _upsert_metric_row(path, row: dict):
    """Write/replace the row keyed by (dataset, arch, L, T) and keep the
    file sorted so repeated runs produce identical bytes."""
    rows = []
    if os.path.exists(path):
        rows = reporting.read_metric_rows(path)
    key = (row["dataset"], row["arch"], row["L"], row["T"])
    rows = [r for r in rows if (r["dataset"], r["arch"], r["L"], r["T"]) != key]
    rows.append(row)
    rows.sort(key=lambda r: (r["dataset"], r["arch"], r["L"], r["T"]))
    reporting.write_metric_rows(path, rows)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_synth(args) -> int:
    spec = SynthSpec(
        n_buildings=args.buildings,
        n_steps=args.steps,
        n_types=args.types,
        seed=args.seed if args.seed is not None else 0,
        noise_std=args.noise_std,
    )
    records = generate(spec)
    with run_lock(args.out_dir) as out:
        write_dataset_csv(records, out / "timeseries.csv", out / "static.csv")
        manifest = {
            "command": "synth",
            "n_buildings": spec.n_buildings,
            "n_steps": spec.n_steps,
            "n_types": spec.n_types,
            "seed": spec.seed,
            "building_ids": [r.building_id for r in records],
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    log.info("wrote %d buildings x %d steps to %s",
             spec.n_buildings, spec.n_steps, args.out_dir)
    return 0


def cmd_curate(args) -> int:
    cfg = _merge_config(args)
    spec = _curation_spec(cfg)
    if spec is None:
        raise ConfigError("curation: section is required for the curate command")
    pool = _load_records(cfg)
    dataset = curate(pool, spec)
    card = heterogeneity_report(dataset)
    out_dir = _get(cfg, "output.dir")
    with run_lock(out_dir) as out:
        write_dataset_csv(dataset.records, out / "timeseries.csv", out / "static.csv")
        manifest = dataset.manifest()
        manifest["forecast_row_order"] = (
            "building-major, time-minor: rows sorted by building_id, then by "
            "window start time; one forecast row per (window_index, step)"
        )
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
        with open(out / "heterogeneity.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["building_type", "count", "load_min", "load_q1",
                             "load_median", "load_q3", "load_max"])
            for t in sorted(card.type_spread):
                s = card.type_spread[t]
                writer.writerow([t, s.count, repr(s.minimum), repr(s.q1),
                                 repr(s.median), repr(s.q3), repr(s.maximum)])
            writer.writerow(["__pooled__", card.n_buildings, "", "",
                             repr(card.pooled_mean), "", ""])
    log.info("curated %d buildings (%s) -> %s; pooled load mean %.4f std %.4f",
             len(dataset), spec.mode, out_dir, card.pooled_mean, card.pooled_std)
    return 0


def cmd_correlate(args) -> int:
    cfg = _merge_config(args)
    pool = _load_records(cfg)
    rep = correlation_report(pool)
    selection = select_features(
        rep,
        k_weather=min(args.k_weather, len(rep.weather)),
        k_static=min(args.k_static, len(rep.static)),
    )
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "feature", "r", "selected"])
        for group, coefs, chosen in (
            ("weather", rep.weather, selection.weather),
            ("static", rep.static, selection.static),
        ):
            for name in sorted(coefs, key=lambda n: (-abs(coefs[n]), n)):
                writer.writerow([group, name, repr(coefs[name]),
                                 int(name in chosen)])
    log.info("wrote correlations for %d weather + %d static features to %s",
             len(rep.weather), len(rep.static), args.out)
    return 0


def cmd_train(args) -> int:
    cfg = _merge_config(args)
    records = _load_records(cfg)
    spec = _curation_spec(cfg)
    if spec is not None:
        records = curate(records, spec).records
    window = _window_spec(cfg)
    scope = _get(cfg, "dataset.scope", "global")
    stats, train_set, val_set, _, _ = _prepare_sets(records, window, scope)
    metric_cfg = MetricConfig(sigma_y=stats.sigma_y_normalized)

    arch = _get(cfg, "model.arch")
    hp = _get(cfg, "model.hyperparameters", None)
    seed = _get(cfg, "seed", 0)
    train_cfg = TrainConfig(
        max_epochs=_get(cfg, "train.max_epochs", 20),
        batch_size=_get(cfg, "train.batch_size", 1024),
        patience=_get(cfg, "train.patience", 5),
        learning_rate=_get(cfg, "train.learning_rate", 1e-3),
        lr_grid=tuple(_get(cfg, "train.lr_grid", DEFAULT_LR_GRID)),
        optimizer=_get(cfg, "train.optimizer", "adam"),
        grad_clip=_get(cfg, "train.grad_clip", None),
        candidate_epochs=_get(cfg, "train.candidate_epochs", None),
        seed=seed,
    )
    use_grid = _get(cfg, "train.grid", False)
    out_dir = _get(cfg, "output.dir")

    with run_lock(out_dir) as out:
        if use_grid:
            result = grid_search(arch, hp, window, train_set, val_set,
                                 train_cfg, metric_cfg)
            model = build(arch, window, hp, seed=seed)
            model.load_state_dict(result.best_state)
            train_log = result.best_log
            chosen_lr = result.best_lr
            with open(out / "grid.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["lr", "val_nmse", "diverged",
                                 "termination_epoch", "best_epoch"])
                for entry in result.entries:
                    writer.writerow([repr(entry.lr), repr(entry.val_nmse),
                                     int(entry.diverged),
                                     entry.termination_epoch, entry.best_epoch])
        else:
            model = build(arch, window, hp, seed=seed)
            model, train_log = train(model, train_set, val_set, train_cfg,
                                     metric_cfg)
            chosen_lr = train_cfg.learning_rate
        train_log.to_jsonl(out / "trainlog.jsonl")
        meta = {
            "dataset": _dataset_name(cfg),
            "arch": arch,
            "L": window.lookback,
            "T": window.lookahead,
            "lr": chosen_lr,
            "seed": seed,
            "scope": scope,
            "best_val_nmse": train_log.best_val_nmse,
        }
        save_checkpoint(out / "checkpoint.pt", model, normalizer=stats, meta=meta)
    log.info("trained %s (lr=%g): best val NMSE %.6f at epoch %d -> %s",
             arch, chosen_lr, train_log.best_val_nmse, train_log.best_epoch,
             out_dir)
    return 0


def cmd_evaluate(args) -> int:
    cfg = _merge_config(args)
    model, stats, meta = load_checkpoint(args.checkpoint)
    if stats is None:
        raise BadValue(f"{args.checkpoint} carries no normalizer stats")
    records = _load_records(cfg)
    spec = _curation_spec(cfg)
    if spec is not None:
        records = curate(records, spec).records
    window = model.window
    splits = [split(rec, SplitSpec()) for rec in records]
    norm_test = WindowSet(
        [apply_normalizer(te, stats) for _, _, te in splits], window
    )
    raw_test = WindowSet([te for _, _, te in splits], window)

    space = _get(cfg, "metrics.space", "normalized")
    if space == "normalized":
        scores = evaluate(model, norm_test,
                          MetricConfig(sigma_y=stats.metric_sigma("normalized")))
        preds = None
        if args.export_forecast:
            preds = predict(model, norm_test)
    elif space == "physical":
        preds_n = predict(model, norm_test)
        preds = _denormalized_predictions(preds_n, raw_test, stats)
        scores = _score(preds, raw_test.targets(), stats.metric_sigma("physical"))
    else:
        raise ConfigError(f"metrics.space: unknown space {space!r}")

    if args.export_forecast:
        reporting.write_forecast_csv(args.export_forecast, preds)
        log.info("exported %s-space forecasts to %s", space, args.export_forecast)

    row = {
        "dataset": _dataset_name(cfg),
        "arch": meta.get("arch", model.arch),
        "L": window.lookback,
        "T": window.lookahead,
        "nmse": scores["nmse"],
        "nmae": scores["nmae"],
        "seed": str(meta.get("seed", "")),
        "lr": repr(meta["lr"]) if "lr" in meta else "",
    }
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    _upsert_metric_row(args.out, row)
    log.info("%s %s L=%d T=%d: NMSE %.6f NMAE %.6f (%s space)",
             row["dataset"], row["arch"], row["L"], row["T"],
             scores["nmse"], scores["nmae"], space)
    return 0


def cmd_report(args) -> int:
    rows = reporting.read_metric_rows(args.metrics)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    reporting.write_report(out_dir / "report.csv", out_dir / "report.md", rows)
    log.info("wrote report over %d rows to %s", len(rows), args.out_dir)
    return 0


def cmd_plot_predictions(args) -> int:
    cfg = _merge_config(args)
    if args.first_k < 1:
        raise BadValue(f"first_k must be >= 1, got {args.first_k}")
    if (args.checkpoint is None) == (args.forecast is None):
        raise ConfigError("exactly one of --checkpoint/--forecast is required")

    records = _load_records(cfg)
    if not 0 <= args.building_index < len(records):
        raise BadIndex(
            f"building index {args.building_index} outside "
            f"[0, {len(records)}) for this dataset"
        )

    scope = _get(cfg, "dataset.scope", "global")
    splits = [split(rec, SplitSpec()) for rec in records]
    if args.checkpoint:
        model, stats, _ = load_checkpoint(args.checkpoint)
        if stats is None:
            raise BadValue(f"{args.checkpoint} carries no normalizer stats")
        window = model.window
    else:
        model = None
        window = _window_spec(cfg)
        stats = fit_normalizer([tr for tr, _, _ in splits], scope=scope)

    raw_test = WindowSet([te for _, _, te in splits], window)
    building = records[args.building_index]

    if model is not None:
        seg = apply_normalizer(splits[args.building_index][2], stats)
        preds_n = predict(model, WindowSet([seg], window))
        preds = denormalize_loads(preds_n, stats, building.building_id)
    else:
        all_preds = reporting.read_forecast_csv(
            args.forecast, len(raw_test), window.lookahead
        )
        lo, hi = raw_test.segment_bounds(args.building_index)
        preds = denormalize_loads(all_preds[lo:hi], stats, building.building_id)

    lo, hi = raw_test.segment_bounds(args.building_index)
    truth = raw_test.targets()[lo:hi]
    n = hi - lo
    k = min(args.first_k, n)
    if k < args.first_k:
        log.warning("building %s has only %d test windows; clamping first_k",
                    building.building_id, n)
    step = args.horizon_step if args.horizon_step >= 0 else window.lookahead - 1
    if step >= window.lookahead:
        raise BadIndex(f"horizon step {step} outside [0, {window.lookahead})")
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    reporting.plot_horizon_predictions(
        args.out,
        truth[:k, step],
        preds[:k, step],
        title=(f"{building.building_id}: {step + 1}-of-{window.lookahead} "
               f"step-ahead forecast, first {k} test points"),
    )
    log.info("wrote prediction plot to %s", args.out)
    return 0


def cmd_eval_external(args) -> int:
    cfg = _merge_config(args)
    records = _load_records(cfg)
    window = _window_spec(cfg)
    scope = _get(cfg, "dataset.scope", "global")
    stats, _, _, norm_test, raw_test = _prepare_sets(records, window, scope)

    preds = reporting.read_forecast_csv(args.forecast, len(norm_test),
                                        window.lookahead)
    space = _get(cfg, "metrics.space", "normalized")
    if space == "normalized":
        scores = _score(preds, norm_test.targets(),
                        stats.metric_sigma("normalized"))
    elif space == "physical":
        preds_phys = _denormalized_predictions(preds, raw_test, stats)
        scores = _score(preds_phys, raw_test.targets(),
                        stats.metric_sigma("physical"))
    else:
        raise ConfigError(f"metrics.space: unknown space {space!r}")

    row = {
        "dataset": _dataset_name(cfg),
        "arch": args.arch_label,
        "L": window.lookback,
        "T": window.lookahead,
        "nmse": scores["nmse"],
        "nmae": scores["nmae"],
        "seed": "",
        "lr": "",
    }
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    _upsert_metric_row(args.out, row)
    log.info("external %s L=%d T=%d: NMSE %.6f NMAE %.6f",
             args.arch_label, window.lookback, window.lookahead,
             scores["nmse"], scores["nmae"])
    return 0


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _add_dataset_flags(p):
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--timeseries", help="timeseries CSV (overrides config)")
    p.add_argument("--static", help="static-features CSV (overrides config)")
    p.add_argument("--dataset-name", dest="dataset_name",
                   help="label used in metric rows")
    p.add_argument("--scope", choices=("global", "per_building"),
                   help="normalization scope")
    p.add_argument("--seed", type=int, default=None)


def _add_window_flags(p):
    p.add_argument("--lookback", type=int, default=None, help="history length L")
    p.add_argument("--lookahead", type=int, default=None, help="horizon length T")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loadbench",
        description="Short-term building-load forecasting benchmark toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic building pool")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--buildings", type=int, default=8)
    p.add_argument("--steps", type=int, default=4 * 672)
    p.add_argument("--types", type=int, default=1)
    p.add_argument("--noise-std", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("curate", help="select a building subset from a pool")
    _add_dataset_flags(p)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--mode", choices=("heterogeneous", "homogeneous"),
                   default=None)
    p.add_argument("--building-type", dest="building_type", default=None)
    p.add_argument("--curation-seed", dest="curation_seed", type=int,
                   default=None)
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("correlate", help="rank features by load correlation")
    _add_dataset_flags(p)
    p.add_argument("--out", required=True, help="output correlations CSV")
    p.add_argument("--k-weather", type=int, default=2)
    p.add_argument("--k-static", type=int, default=3)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("train", help="train one architecture on a dataset")
    _add_dataset_flags(p)
    _add_window_flags(p)
    p.add_argument("--arch", default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--max-epochs", dest="max_epochs", type=int, default=None)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--patience", type=int, default=None)
    p.add_argument("--grid", action="store_const", const=True, default=None,
                   help="sweep the learning-rate grid")
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a checkpoint on test windows")
    _add_dataset_flags(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True, help="metrics CSV to update")
    p.add_argument("--space", choices=("normalized", "physical"), default=None)
    p.add_argument("--export-forecast", dest="export_forecast", default=None,
                   help="also write predictions as a forecast CSV")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="comparison tables from metric rows")
    p.add_argument("--metrics", nargs="+", required=True,
                   help="one or more metrics CSVs")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("plot-predictions",
                       help="plot forecasts against ground truth")
    _add_dataset_flags(p)
    _add_window_flags(p)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--forecast", default=None,
                   help="external forecast CSV instead of a checkpoint")
    p.add_argument("--building-index", type=int, default=5,
                   help="0-based index into the dataset's sorted buildings")
    p.add_argument("--first-k", dest="first_k", type=int, default=500)
    p.add_argument("--horizon-step", dest="horizon_step", type=int, default=-1,
                   help="which forecast step to trace; -1 means the last")
    p.add_argument("--out", required=True, help="output image path")
    p.set_defaults(func=cmd_plot_predictions)

    p = sub.add_parser("eval-external",
                       help="score an external forecast file")
    _add_dataset_flags(p)
    _add_window_flags(p)
    p.add_argument("--forecast", required=True)
    p.add_argument("--arch-label", dest="arch_label", default="external")
    p.add_argument("--out", required=True, help="metrics CSV to update")
    p.add_argument("--space", choices=("normalized", "physical"), default=None)
    p.set_defaults(func=cmd_eval_external)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LoadBenchError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(json.dumps({"error": "FileNotFound", "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
