"""Decomposition architecture: moving-average trend/seasonal splits woven
through the encoder and decoder, with delay-aggregation attention.

The decomposition is exact by construction (seasonal = input - trend), and
the trend path accumulates through the decoder into the final forecast.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from ..errors import BadHyperparameters
from .attention import AttentionLayer, AutoCorrelation
from .base import ForecastModel
from .embed import EmbeddingBlock
from .transformer import FeedForward

AUTOFORMER_DEFAULTS = {
    "d_model": 128,
    "n_heads": 4,
    "e_layers": 3,
    "d_layers": 3,
    "d_ff": 512,
    "dropout": 0.1,
    "moving_avg": 25,
    "factor": 5,
}


class MovingAverage(nn.Module):
    """Sliding mean over time with replicate edge padding, length-preserving."""

    def __init__(self, window: int):
        super().__init__()
        if window < 1 or window % 2 == 0:
            raise BadHyperparameters(f"moving average window must be odd, got {window}")
        self.window = window
        self.pool = nn.AvgPool1d(kernel_size=window, stride=1)

    def forward(self, x):
        # x: (B, L, D)
        half = (self.window - 1) // 2
        front = x[:, :1, :].expand(-1, half, -1)
        back = x[:, -1:, :].expand(-1, half, -1)
        padded = torch.cat([front, x, back], dim=1)
        return self.pool(padded.transpose(1, 2)).transpose(1, 2)


class SeriesDecomposition(nn.Module):
    """Split x into (seasonal, trend) with seasonal + trend == x exactly."""

    def __init__(self, window: int):
        super().__init__()
        self.moving_avg = MovingAverage(window)

    def forward(self, x):
        trend = self.moving_avg(x)
        return x - trend, trend


class SeasonalLayerNorm(nn.Module):
    """LayerNorm re-centered over time, applied to seasonal streams."""

    def __init__(self, d_model: int):
        super().__init__()
        self.norm = nn.LayerNorm(d_model)

    def forward(self, x):
        x_hat = self.norm(x)
        return x_hat - x_hat.mean(dim=1, keepdim=True)


class DecompEncoderLayer(nn.Module):
    def __init__(self, attention, d_model, d_ff, moving_avg, dropout):
        super().__init__()
        self.attention = attention
        self.ff = FeedForward(d_model, d_ff, dropout)
        self.decomp1 = SeriesDecomposition(moving_avg)
        self.decomp2 = SeriesDecomposition(moving_avg)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x):
        x, _ = self.decomp1(x + self.dropout(self.attention(x, x, x)))
        x, _ = self.decomp2(x + self.dropout(self.ff(x)))
        return x


class DecompDecoderLayer(nn.Module):
    def __init__(self, self_attention, cross_attention, d_model, d_ff,
                 moving_avg, dropout):
        super().__init__()
        self.self_attention = self_attention
        self.cross_attention = cross_attention
        self.ff = FeedForward(d_model, d_ff, dropout)
        self.decomp1 = SeriesDecomposition(moving_avg)
        self.decomp2 = SeriesDecomposition(moving_avg)
        self.decomp3 = SeriesDecomposition(moving_avg)
        self.trend_proj = nn.Linear(d_model, 1)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x, memory):
        x, trend1 = self.decomp1(x + self.dropout(self.self_attention(x, x, x)))
        x, trend2 = self.decomp2(x + self.dropout(self.cross_attention(x, memory, memory)))
        x, trend3 = self.decomp3(x + self.dropout(self.ff(x)))
        return x, self.trend_proj(trend1 + trend2 + trend3)


class Autoformer(ForecastModel):
    arch = "autoformer"

    def __init__(self, window, hp):
        super().__init__(window, hp)
        d, h = hp["d_model"], hp["n_heads"]
        ff, p, ma = hp["d_ff"], hp["dropout"], hp["moving_avg"]
        L, T = window.lookback, window.lookahead
        if ma >= L:
            raise BadHyperparameters(
                f"moving average window {ma} must be smaller than lookback {L}"
            )
        # No sinusoidal positions: delay aggregation is order-aware already.
        self.enc_embed = EmbeddingBlock(d, L + T, p, positional=False)
        self.dec_embed = EmbeddingBlock(d, L + T, p, positional=False)
        factor = hp["factor"]
        self.encoder = nn.ModuleList(
            DecompEncoderLayer(
                AttentionLayer(AutoCorrelation(factor, p), d, h), d, ff, ma, p
            )
            for _ in range(hp["e_layers"])
        )
        self.enc_norm = SeasonalLayerNorm(d)
        self.decoder = nn.ModuleList(
            DecompDecoderLayer(
                AttentionLayer(AutoCorrelation(factor, p), d, h),
                AttentionLayer(AutoCorrelation(factor, p), d, h),
                d, ff, ma, p,
            )
            for _ in range(hp["d_layers"])
        )
        self.dec_norm = SeasonalLayerNorm(d)
        self.head = nn.Linear(d, 1)

    def forward(self, y, x, u, s):
        self.check_batch(y, x, u, s)
        L, T = self.window.lookback, self.window.lookahead
        cont = torch.cat([y.unsqueeze(-1), x], dim=-1)
        enc = self.enc_embed(cont, u[:, :L], s, offset=0)
        for layer in self.encoder:
            enc = layer(enc)
        enc = self.enc_norm(enc)

        # Horizon init: zero seasonal tokens, lookback-mean trend.
        dec = self.dec_embed(
            torch.zeros(y.shape[0], T, cont.shape[-1], dtype=y.dtype, device=y.device),
            u[:, L:], s, offset=L,
        )
        trend = y.mean(dim=1, keepdim=True).unsqueeze(-1).expand(-1, T, 1)
        for layer in self.decoder:
            dec, residual_trend = layer(dec, enc)
            trend = trend + residual_trend
        return self.head(self.dec_norm(dec)) + trend
