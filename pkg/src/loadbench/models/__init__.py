"""Architecture registry, model construction, and checkpoint IO."""

from __future__ import annotations

import logging

import torch

from ..data import NormStats, WindowSpec
from ..errors import BadHyperparameters, SchemaMismatch, UnknownArchitecture
from .autoformer import AUTOFORMER_DEFAULTS, Autoformer
from .base import ForecastModel, batch_to_tensors
from .informer import INFORMER_DEFAULTS, Informer
from .lstm import LSTM_DEFAULTS, LSTMForecaster
from .lstnet import LSTNET_DEFAULTS, LSTNet
from .patchtst import PATCHTST_DEFAULTS, PatchTST
from .timesnet import TIMESNET_DEFAULTS, TimesNet
from .transformer import TRANSFORMER_DEFAULTS, VanillaTransformer

__all__ = [
    "ARCHITECTURES",
    "ForecastModel",
    "batch_to_tensors",
    "build",
    "count_parameters",
    "default_hyperparameters",
    "load_checkpoint",
    "save_checkpoint",
]

log = logging.getLogger(__name__)

_REGISTRY: dict[str, tuple[type, dict]] = {
    "lstm": (LSTMForecaster, LSTM_DEFAULTS),
    "lstnet": (LSTNet, LSTNET_DEFAULTS),
    "transformer": (VanillaTransformer, TRANSFORMER_DEFAULTS),
    "autoformer": (Autoformer, AUTOFORMER_DEFAULTS),
    "informer": (Informer, INFORMER_DEFAULTS),
    "timesnet": (TimesNet, TIMESNET_DEFAULTS),
    "patchtst": (PatchTST, PATCHTST_DEFAULTS),
}

ARCHITECTURES = tuple(sorted(_REGISTRY))

CHECKPOINT_FORMAT = "loadbench-checkpoint"
CHECKPOINT_VERSION = 1


def default_hyperparameters(arch: str) -> dict:
    if arch not in _REGISTRY:
        raise UnknownArchitecture(
            f"unknown architecture {arch!r}; known: {', '.join(ARCHITECTURES)}"
        )
    return dict(_REGISTRY[arch][1])


def build(
    arch: str,
    window: WindowSpec,
    hp: dict | None = None,
    seed: int = 0,
) -> ForecastModel:
    """Construct a seeded, initialized model.

    Missing hyperparameters fall back to the architecture defaults; unknown
    keys are rejected. Two builds with the same arguments are parameter-
    identical.
    """
    defaults = default_hyperparameters(arch)
    merged = dict(defaults)
    for key, value in (hp or {}).items():
        if key not in defaults:
            raise BadHyperparameters(
                f"{arch} does not take {key!r}; valid keys: {sorted(defaults)}"
            )
        merged[key] = value
    cls = _REGISTRY[arch][0]
    torch.manual_seed(seed)
    model = cls(window, merged)
    log.info("built %s (L=%d, T=%d): %d parameters",
             arch, window.lookback, window.lookahead, count_parameters(model))
    return model


def count_parameters(model: torch.nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())


def save_checkpoint(
    path,
    model: ForecastModel,
    normalizer: NormStats | None = None,
    meta: dict | None = None,
):
    torch.save(
        {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "arch": model.arch,
            "hyperparameters": model.hp,
            "window": {
                "lookback": model.window.lookback,
                "lookahead": model.window.lookahead,
            },
            "state": model.state_dict(),
            "normalizer": normalizer.to_dict() if normalizer is not None else None,
            "meta": dict(meta or {}),
        },
        path,
    )


def load_checkpoint(path) -> tuple[ForecastModel, NormStats | None, dict]:
    payload = torch.load(path, weights_only=True)
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise SchemaMismatch(f"{path} is not a model checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise SchemaMismatch(f"unsupported checkpoint version {payload.get('version')}")
    window = WindowSpec(**payload["window"])
    model = build(payload["arch"], window, payload["hyperparameters"])
    model.load_state_dict(payload["state"])
    model.eval()
    norm = payload.get("normalizer")
    return (
        model,
        NormStats.from_dict(norm) if norm is not None else None,
        payload.get("meta", {}),
    )
