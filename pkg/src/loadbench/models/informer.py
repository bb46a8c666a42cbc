"""Transformer variant with query-sparse attention in the encoder.

Only encoder self-attention is sparse; the decoder keeps masked full
self-attention and full cross-attention.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .attention import AttentionLayer, FullAttention, ProbAttention
from .base import ForecastModel
from .embed import EmbeddingBlock
from .transformer import DecoderLayer, EncoderLayer

INFORMER_DEFAULTS = {
    "d_model": 128,
    "n_heads": 4,
    "e_layers": 3,
    "d_layers": 3,
    "d_ff": 512,
    "dropout": 0.1,
    "factor": 5,
}


class Informer(ForecastModel):
    arch = "informer"

    def __init__(self, window, hp):
        super().__init__(window, hp)
        d, h = hp["d_model"], hp["n_heads"]
        ff, p = hp["d_ff"], hp["dropout"]
        L, T = window.lookback, window.lookahead
        self.enc_embed = EmbeddingBlock(d, L + T, p)
        self.dec_embed = EmbeddingBlock(d, L + T, p)
        self.encoder = nn.ModuleList(
            EncoderLayer(
                AttentionLayer(ProbAttention(hp["factor"], p, seed=i), d, h),
                d, ff, p,
            )
            for i in range(hp["e_layers"])
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
