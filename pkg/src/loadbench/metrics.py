"""Normalized error metrics.

NMSE = (1 / (n * |T|)) * sum ||yhat - y||_2^2 / sigma_y^2
NMAE = (1 / (n * |T|)) * sum ||yhat - y||_1 / sigma_y

where |T| counts every (window, horizon-step) pair in the evaluation set
and n is the per-step output dimension (1 for scalar load). NMSE doubles
as the training loss. By default evaluation happens in normalized space,
where sigma_y is the normalized-train load std (1 up to floating point);
physical-space evaluation plugs in the raw-kWh std instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadValue, EmptyEvaluation, ShapeError


@dataclass(frozen=True)
class MetricConfig:
    """Normalizer and output dimension for both metrics."""

    sigma_y: float
    n: int = 1

    def __post_init__(self):
        if not self.sigma_y > 0:
            raise BadValue(f"sigma_y must be > 0, got {self.sigma_y}")
        if int(self.n) < 1:
            raise BadValue(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))


def _residuals(predictions, targets, cfg: MetricConfig) -> np.ndarray:
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if p.shape != t.shape:
        raise ShapeError(f"predictions {p.shape} vs targets {t.shape}")
    if p.size == 0:
        raise EmptyEvaluation("no (window, step) pairs to evaluate")
    if p.size % cfg.n != 0:
        raise ShapeError(f"{p.size} elements not divisible by n = {cfg.n}")
    return p - t


def nmse(predictions, targets, cfg: MetricConfig) -> float:
    # mean over all elements = sum / (n * |T|) for any (windows, steps, n) layout
    r = _residuals(predictions, targets, cfg)
    return float(np.mean(r * r)) / cfg.sigma_y**2


def nmae(predictions, targets, cfg: MetricConfig) -> float:
    r = _residuals(predictions, targets, cfg)
    return float(np.mean(np.abs(r))) / cfg.sigma_y


class MetricAccumulator:
    """Streaming NMSE/NMAE over batches; equals the single-pass values."""

    def __init__(self, cfg: MetricConfig):
        self.cfg = cfg
        self._sq = 0.0
        self._abs = 0.0
        self._count = 0

    def update(self, predictions, targets):
        r = _residuals(predictions, targets, self.cfg)
        self._sq += float(np.dot(r.ravel(), r.ravel()))
        self._abs += float(np.sum(np.abs(r)))
        self._count += r.size

    @property
    def count(self) -> int:
        return self._count

    def nmse(self) -> float:
        if self._count == 0:
            raise EmptyEvaluation("accumulator saw no data")
        return self._sq / self._count / self.cfg.sigma_y**2

    def nmae(self) -> float:
        if self._count == 0:
            raise EmptyEvaluation("accumulator saw no data")
        return self._abs / self._count / self.cfg.sigma_y
