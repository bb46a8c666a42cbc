"""Training protocol: NMSE loss, per-epoch validation, patience-based early
stopping, learning-rate grid search, and deterministic evaluation."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import torch

from .data import WindowSet
from .errors import (
    AllDiverged,
    BadValue,
    DivergenceError,
    InsufficientData,
    SchemaMismatch,
)
from .metrics import MetricAccumulator, MetricConfig
from .models import ForecastModel, batch_to_tensors, build

DEFAULT_LR_GRID = (1e-3, 5e-4, 1e-4, 5e-5, 1e-5, 5e-6, 1e-6, 5e-7)


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 20
    batch_size: int = 1024
    patience: int = 5
    learning_rate: float = 1e-3
    lr_grid: tuple[float, ...] = DEFAULT_LR_GRID
    optimizer: str = "adam"
    betas: tuple[float, float] = (0.9, 0.999)
    weight_decay: float = 0.0
    grad_clip: float | None = None
    seed: int = 0
    # Epochs per grid-search candidate; None trains each for max_epochs.
    candidate_epochs: int | None = None

    def __post_init__(self):
        if self.max_epochs < 1:
            raise BadValue("max_epochs must be >= 1")
        if self.patience < 1:
            raise BadValue("patience must be >= 1")
        if self.batch_size < 1:
            raise BadValue("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise BadValue("learning_rate must be > 0")
        grid = tuple(float(lr) for lr in self.lr_grid)
        if not grid:
            raise BadValue("lr_grid must be non-empty")
        if any(lr <= 0 for lr in grid):
            raise BadValue("lr_grid values must be > 0")
        if any(a <= b for a, b in zip(grid, grid[1:])):
            raise BadValue("lr_grid must be strictly descending")
        object.__setattr__(self, "lr_grid", grid)
        if self.candidate_epochs is not None and self.candidate_epochs < 1:
            raise BadValue("candidate_epochs must be >= 1 when set")


@dataclass(frozen=True)
class TrainLog:
    """Per-epoch history plus termination bookkeeping. Epochs are 1-based."""

    arch: str
    lr: float
    seed: int
    train_loss: list[float]
    val_nmse: list[float]
    epoch_seconds: list[float]
    termination_epoch: int
    best_epoch: int
    best_val_nmse: float
    early_stopped: bool

    def __post_init__(self):
        if not (
            len(self.train_loss) == len(self.val_nmse) == len(self.epoch_seconds)
            == self.termination_epoch
        ):
            raise BadValue("per-epoch histories must match the termination epoch")
        if not 1 <= self.best_epoch <= self.termination_epoch:
            raise BadValue("best epoch must lie within the run")

    def signature(self) -> dict:
        """Everything except wall-clock timings, for determinism checks."""
        return {
            "arch": self.arch,
            "lr": self.lr,
            "seed": self.seed,
            "train_loss": list(self.train_loss),
            "val_nmse": list(self.val_nmse),
            "termination_epoch": self.termination_epoch,
            "best_epoch": self.best_epoch,
            "best_val_nmse": self.best_val_nmse,
            "early_stopped": self.early_stopped,
        }

    def to_jsonl(self, path):
        with open(path, "w") as fh:
            for i in range(self.termination_epoch):
                fh.write(json.dumps({
                    "epoch": i + 1,
                    "train_loss": self.train_loss[i],
                    "val_nmse": self.val_nmse[i],
                    "seconds": self.epoch_seconds[i],
                }) + "\n")
            fh.write(json.dumps({"summary": self.signature()}) + "\n")


class EarlyStopper:
    """Patience rule over the validation curve.

    The run stops after epoch e once the best epoch is `patience - 1`
    epochs stale counting e itself, i.e. e - best_epoch >= patience - 1
    with at least one non-improving epoch. Improvement means strictly
    lower validation NMSE. With the curve [5, 4, 3, 3, 3, 3, 3] and
    patience 5 this stops after epoch 7 with best epoch 3.
    """

    def __init__(self, patience: int):
        self.patience = patience
        self.best = math.inf
        self.best_epoch = 0

    def update(self, epoch: int, value: float) -> bool:
        """Record epoch's validation value; True means stop after it."""
        if value < self.best:
            self.best = value
            self.best_epoch = epoch
            return False
        return epoch > self.best_epoch and (epoch - self.best_epoch) >= self.patience - 1


def simulate_early_stopping(
    curve: Sequence[float], patience: int
) -> tuple[int, int, bool]:
    """Pure stopping-rule simulation -> (termination_epoch, best_epoch, stopped)."""
    stopper = EarlyStopper(patience)
    for epoch, value in enumerate(curve, start=1):
        if stopper.update(epoch, value):
            return epoch, stopper.best_epoch, True
    return len(curve), stopper.best_epoch, False


def _make_optimizer(model: torch.nn.Module, cfg: TrainConfig):
    if cfg.optimizer == "adam":
        return torch.optim.Adam(
            model.parameters(), lr=cfg.learning_rate, betas=cfg.betas,
            weight_decay=cfg.weight_decay,
        )
    if cfg.optimizer == "adamw":
        return torch.optim.AdamW(
            model.parameters(), lr=cfg.learning_rate, betas=cfg.betas,
            weight_decay=cfg.weight_decay,
        )
    if cfg.optimizer == "sgd":
        return torch.optim.SGD(
            model.parameters(), lr=cfg.learning_rate,
            weight_decay=cfg.weight_decay,
        )
    raise BadValue(f"unknown optimizer {cfg.optimizer!r}")


def _clone_state(model: torch.nn.Module) -> dict:
    return {k: v.detach().clone() for k, v in model.state_dict().items()}


def _check_window(model: ForecastModel, window_set: WindowSet):
    if model.window != window_set.spec:
        raise SchemaMismatch(
            f"model window {model.window} does not match data window "
            f"{window_set.spec}"
        )


def _val_nmse(model, window_set, metric_cfg, batch_size) -> float:
    acc = MetricAccumulator(metric_cfg)
    model.eval()
    with torch.no_grad():
        for start in range(0, len(window_set), batch_size):
            idx = np.arange(start, min(start + batch_size, len(window_set)))
            batch = window_set.gather(idx)
            y, x, u, s, _ = batch_to_tensors(batch)
            pred = model(y, x, u, s).squeeze(-1)
            acc.update(pred.numpy().astype(np.float64), batch["y_target"])
    return acc.nmse()


def train(
    model: ForecastModel,
    train_set: WindowSet,
    val_set: WindowSet,
    cfg: TrainConfig,
    metric_cfg: MetricConfig | None = None,
) -> tuple[ForecastModel, TrainLog]:
    """Run the training protocol and return the model restored to its best
    validation checkpoint, plus the per-epoch log.

    One epoch visits every train window exactly once in a seeded shuffled
    order, including a final partial batch. Validation NMSE is computed
    after each epoch; a non-finite training loss raises DivergenceError
    carrying the last finite parameter state and the truncated log.
    """
    if len(train_set) == 0 or len(val_set) == 0:
        raise InsufficientData("need at least one train and one val window")
    _check_window(model, train_set)
    _check_window(model, val_set)
    metric_cfg = metric_cfg or MetricConfig(sigma_y=1.0)
    sigma_sq = metric_cfg.sigma_y**2

    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    optimizer = _make_optimizer(model, cfg)
    stopper = EarlyStopper(cfg.patience)

    train_hist: list[float] = []
    val_hist: list[float] = []
    seconds: list[float] = []
    best_state = _clone_state(model)
    last_good = best_state
    early_stopped = False
    step = 0

    def _diverge(epoch, partial_losses):
        log = _finish_log(
            model, cfg, train_hist, val_hist, seconds, stopper,
            termination=len(val_hist), early_stopped=False, allow_empty=True,
        )
        state = (
            _clone_state(model)
            if all(torch.isfinite(p).all() for p in model.parameters())
            else last_good
        )
        raise DivergenceError(
            f"non-finite training loss at step {step} (epoch {epoch}); "
            f"{len(partial_losses)} finite steps completed in the epoch",
            last_state=state,
            log=log,
        )

    for epoch in range(1, cfg.max_epochs + 1):
        t0 = time.monotonic()
        model.train()
        perm = rng.permutation(len(train_set))
        losses = []
        for start in range(0, len(perm), cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            y, x, u, s, target = batch_to_tensors(train_set.gather(idx))
            pred = model(y, x, u, s).squeeze(-1)
            loss = torch.mean((pred - target) ** 2) / sigma_sq
            step += 1
            if not torch.isfinite(loss):
                _diverge(epoch, losses)
            last_good = _clone_state(model)
            optimizer.zero_grad()
            loss.backward()
            if cfg.grad_clip is not None:
                torch.nn.utils.clip_grad_norm_(model.parameters(), cfg.grad_clip)
            optimizer.step()
            losses.append(float(loss.item()))

        val = _val_nmse(model, val_set, metric_cfg, cfg.batch_size)
        train_hist.append(float(np.mean(losses)))
        val_hist.append(val)
        seconds.append(time.monotonic() - t0)
        if val < stopper.best:
            best_state = _clone_state(model)
        if stopper.update(epoch, val):
            early_stopped = True
            break

    model.load_state_dict(best_state)
    log = _finish_log(
        model, cfg, train_hist, val_hist, seconds, stopper,
        termination=len(val_hist), early_stopped=early_stopped,
    )
    return model, log


def _finish_log(model, cfg, train_hist, val_hist, seconds, stopper,
                termination, early_stopped, allow_empty=False) -> TrainLog | None:
    if allow_empty and termination == 0:
        return None
    return TrainLog(
        arch=model.arch,
        lr=cfg.learning_rate,
        seed=cfg.seed,
        train_loss=list(train_hist),
        val_nmse=list(val_hist),
        epoch_seconds=list(seconds),
        termination_epoch=termination,
        best_epoch=stopper.best_epoch if stopper.best_epoch else max(termination, 1),
        best_val_nmse=stopper.best,
        early_stopped=early_stopped,
    )


# --------------------------------------------------------------------------
# learning-rate grid search
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GridEntry:
    lr: float
    val_nmse: float
    diverged: bool
    termination_epoch: int
    best_epoch: int


@dataclass(frozen=True)
class GridSearchResult:
    best_lr: float
    entries: list[GridEntry]
    best_state: dict = field(repr=False)
    best_log: TrainLog | None = None


def grid_search(
    arch: str,
    hp: dict | None,
    window,
    train_set: WindowSet,
    val_set: WindowSet,
    cfg: TrainConfig,
    metric_cfg: MetricConfig | None = None,
) -> GridSearchResult:
    """Train one candidate per grid learning rate and keep the best.

    Candidates share the same seeded initialization. Ties in validation
    NMSE resolve toward the larger learning rate. Divergent candidates are
    recorded with an infinite score; if every candidate diverges,
    AllDiverged is raised.
    """
    entries: list[GridEntry] = []
    best = None  # (val, lr, state, log)
    epochs = cfg.candidate_epochs or cfg.max_epochs
    for lr in cfg.lr_grid:
        candidate_cfg = replace(
            cfg, learning_rate=lr, max_epochs=epochs, candidate_epochs=None
        )
        model = build(arch, window, hp, seed=cfg.seed)
        try:
            model, log = train(model, train_set, val_set, candidate_cfg, metric_cfg)
        except DivergenceError:
            entries.append(GridEntry(lr, math.inf, True, 0, 0))
            continue
        entries.append(GridEntry(
            lr, log.best_val_nmse, False, log.termination_epoch, log.best_epoch
        ))
        # Strict comparison in descending-lr order keeps the larger lr on ties.
        if best is None or log.best_val_nmse < best[0]:
            best = (log.best_val_nmse, lr, _clone_state(model), log)
    if best is None:
        raise AllDiverged(
            f"all {len(cfg.lr_grid)} grid candidates diverged for {arch}"
        )
    return GridSearchResult(
        best_lr=best[1], entries=entries, best_state=best[2], best_log=best[3]
    )


# --------------------------------------------------------------------------
# evaluation and prediction
# --------------------------------------------------------------------------

def predict(
    model: ForecastModel, window_set: WindowSet, batch_size: int = 1024
) -> np.ndarray:
    """(n_windows, T) forecasts in enumeration order, eval mode, no grad."""
    _check_window(model, window_set)
    model.eval()
    chunks = []
    with torch.no_grad():
        for start in range(0, len(window_set), batch_size):
            idx = np.arange(start, min(start + batch_size, len(window_set)))
            y, x, u, s, _ = batch_to_tensors(window_set.gather(idx))
            chunks.append(model(y, x, u, s).squeeze(-1).numpy().astype(np.float64))
    return np.concatenate(chunks, axis=0)


def evaluate(
    model: ForecastModel,
    test_set: WindowSet,
    metric_cfg: MetricConfig,
    batch_size: int = 1024,
) -> dict[str, float]:
    """NMSE/NMAE over the full window set in deterministic order."""
    _check_window(model, test_set)
    acc = MetricAccumulator(metric_cfg)
    model.eval()
    with torch.no_grad():
        for start in range(0, len(test_set), batch_size):
            idx = np.arange(start, min(start + batch_size, len(test_set)))
            batch = test_set.gather(idx)
            y, x, u, s, _ = batch_to_tensors(batch)
            pred = model(y, x, u, s).squeeze(-1)
            # float64 residuals against the raw targets, so re-scoring an
            # exported forecast file reproduces these numbers
            acc.update(pred.numpy().astype(np.float64), batch["y_target"])
    return {"nmse": acc.nmse(), "nmae": acc.nmae()}
