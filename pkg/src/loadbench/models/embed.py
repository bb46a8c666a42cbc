"""Input fusion layers shared across architectures."""

from __future__ import annotations

import math

import torch
import torch.nn as nn

from ..data import STEPS_PER_DAY
from .base import N_CONTINUOUS, N_STATIC

N_INTERVALS = STEPS_PER_DAY  # 96 fifteen-minute slots
N_WEEKDAYS = 7


def sinusoidal_table(max_len: int, d_model: int) -> torch.Tensor:
    """(max_len, d_model) fixed sin/cos positional table."""
    pe = torch.zeros(max_len, d_model)
    position = torch.arange(max_len, dtype=torch.float32).unsqueeze(1)
    div = torch.exp(
        torch.arange(0, d_model, 2, dtype=torch.float32)
        * (-math.log(10000.0) / d_model)
    )
    pe[:, 0::2] = torch.sin(position * div)
    pe[:, 1::2] = torch.cos(position * div[: d_model // 2])
    return pe


class EmbeddingBlock(nn.Module):
    """Additive token composition at width d_model.

    token = proj(continuous) + emb(interval) + emb(weekday) + proj(static)
            [+ sinusoidal position], then dropout. Horizon steps carry no
    observed continuous values; callers pass zeros there.
    """

    def __init__(self, d_model: int, max_len: int, dropout: float = 0.1,
                 positional: bool = True):
        super().__init__()
        self.value_proj = nn.Linear(N_CONTINUOUS, d_model)
        self.interval_emb = nn.Embedding(N_INTERVALS, d_model)
        self.weekday_emb = nn.Embedding(N_WEEKDAYS, d_model)
        self.static_proj = nn.Linear(N_STATIC, d_model)
        self.dropout = nn.Dropout(dropout)
        self.positional = positional
        if positional:
            self.register_buffer("pe", sinusoidal_table(max_len, d_model))
        for emb in (self.interval_emb, self.weekday_emb):
            nn.init.normal_(emb.weight, std=0.02)

    def forward(self, cont, u, s, offset: int = 0):
        # cont: (B, steps, 3), u: (B, steps, 2) long, s: (B, 3)
        tok = self.value_proj(cont) \
            + self.interval_emb(u[..., 0]) \
            + self.weekday_emb(u[..., 1]) \
            + self.static_proj(s).unsqueeze(1)
        if self.positional:
            tok = tok + self.pe[offset : offset + cont.shape[1]].to(tok.dtype)
        return self.dropout(tok)


class StepFeatures(nn.Module):
    """Per-step concatenated feature vector for the recurrent models.

    [load(1), weather(2), interval emb(4), weekday emb(4), static(3)] = 14.
    """

    emb_dim = 4
    out_dim = N_CONTINUOUS + 2 * emb_dim + N_STATIC

    def __init__(self):
        super().__init__()
        self.interval_emb = nn.Embedding(N_INTERVALS, self.emb_dim)
        self.weekday_emb = nn.Embedding(N_WEEKDAYS, self.emb_dim)
        for emb in (self.interval_emb, self.weekday_emb):
            nn.init.normal_(emb.weight, std=0.02)

    def forward(self, y, x, u, s):
        L = y.shape[1]
        return torch.cat(
            [
                y.unsqueeze(-1),
                x,
                self.interval_emb(u[:, :L, 0]),
                self.weekday_emb(u[:, :L, 1]),
                s.unsqueeze(1).expand(-1, L, -1),
            ],
            dim=-1,
        )
