"""Encoder-decoder Transformer for load forecasting.

The encoder reads the embedded lookback; the decoder queries are horizon
tokens built from the known calendar indices over (t, t+T] with a zero
placeholder for the unobserved continuous values. Decoder self-attention
is causal.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .attention import AttentionLayer, FullAttention
from .base import ForecastModel
from .embed import EmbeddingBlock

TRANSFORMER_DEFAULTS = {
    "d_model": 128,
    "n_heads": 4,
    "e_layers": 3,
    "d_layers": 3,
    "d_ff": 512,
    "dropout": 0.1,
}


class FeedForward(nn.Module):
    def __init__(self, d_model: int, d_ff: int, dropout: float):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(d_model, d_ff),
            nn.GELU(),
            nn.Dropout(dropout),
            nn.Linear(d_ff, d_model),
        )

    def forward(self, x):
        return self.net(x)


class EncoderLayer(nn.Module):
    def __init__(self, attention: AttentionLayer, d_model: int, d_ff: int,
                 dropout: float):
        super().__init__()
        self.attention = attention
        self.ff = FeedForward(d_model, d_ff, dropout)
        self.norm1 = nn.LayerNorm(d_model)
        self.norm2 = nn.LayerNorm(d_model)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x):
        x = self.norm1(x + self.dropout(self.attention(x, x, x)))
        return self.norm2(x + self.dropout(self.ff(x)))


class DecoderLayer(nn.Module):
    def __init__(self, self_attention: AttentionLayer, cross_attention: AttentionLayer,
                 d_model: int, d_ff: int, dropout: float):
        super().__init__()
        self.self_attention = self_attention
        self.cross_attention = cross_attention
        self.ff = FeedForward(d_model, d_ff, dropout)
        self.norm1 = nn.LayerNorm(d_model)
        self.norm2 = nn.LayerNorm(d_model)
        self.norm3 = nn.LayerNorm(d_model)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x, memory):
        x = self.norm1(x + self.dropout(self.self_attention(x, x, x)))
        x = self.norm2(x + self.dropout(self.cross_attention(x, memory, memory)))
        return self.norm3(x + self.dropout(self.ff(x)))


class VanillaTransformer(ForecastModel):
    arch = "transformer"

    def __init__(self, window, hp):
        super().__init__(window, hp)
        d, h = hp["d_model"], hp["n_heads"]
        ff, p = hp["d_ff"], hp["dropout"]
        L, T = window.lookback, window.lookahead
        self.enc_embed = EmbeddingBlock(d, L + T, p)
        self.dec_embed = EmbeddingBlock(d, L + T, p)
        self.encoder = nn.ModuleList(
            EncoderLayer(
                AttentionLayer(FullAttention(False, p), d, h), d, ff, p
            )
            for _ in range(hp["e_layers"])
        )
        self.decoder = nn.ModuleList(
            DecoderLayer(
                AttentionLayer(FullAttention(True, p), d, h),
                AttentionLayer(FullAttention(False, p), d, h),
                d, ff, p,
            )
            for _ in range(hp["d_layers"])
        )
        self.head = nn.Linear(d, 1)

    def forward(self, y, x, u, s):
        self.check_batch(y, x, u, s)
        L, T = self.window.lookback, self.window.lookahead
        cont = torch.cat([y.unsqueeze(-1), x], dim=-1)
        enc = self.enc_embed(cont, u[:, :L], s, offset=0)
        for layer in self.encoder:
            enc = layer(enc)
        dec = self.dec_embed(
            torch.zeros(y.shape[0], T, cont.shape[-1], dtype=y.dtype, device=y.device),
            u[:, L:], s, offset=L,
        )
        for layer in self.decoder:
            dec = layer(dec, enc)
        return self.head(dec)
