"""Patch-based channel-independent transformer.

Every input channel (load, weather, scaled calendar indices, broadcast
static features) is cut into overlapping patches that become tokens for a
shared encoder; a shared flatten head maps each channel's tokens to a
T-step forecast and the load channel's output is the model forecast.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from ..data import STEPS_PER_DAY
from ..errors import BadHyperparameters
from .attention import AttentionLayer, FullAttention
from .base import ForecastModel
from .transformer import EncoderLayer

PATCHTST_DEFAULTS = {
    "d_model": 128,
    "n_heads": 3,
    "e_layers": 3,
    "patch_len": 16,
    "stride": 8,
    "d_ff": 512,
    "dropout": 0.1,
}

N_CHANNELS = 8  # load, 2 weather, 2 scaled calendar, 3 static


class PatchTST(ForecastModel):
    arch = "patchtst"

    def __init__(self, window, hp):
        super().__init__(window, hp)
        d, pl, st = hp["d_model"], hp["patch_len"], hp["stride"]
        L, T = window.lookback, window.lookahead
        if pl > L:
            raise BadHyperparameters(f"patch length {pl} exceeds lookback {L}")
        if st < 1:
            raise BadHyperparameters("stride must be >= 1")
        # End padding by one stride, then regular unfolding.
        self.pad = nn.ReplicationPad1d((0, st))
        self.n_patches = (L + st - pl) // st + 1
        self.patch_embed = nn.Linear(pl, d)
        self.pos_embed = nn.Parameter(torch.empty(self.n_patches, d))
        nn.init.normal_(self.pos_embed, std=0.02)
        self.dropout = nn.Dropout(hp["dropout"])
        self.encoder = nn.ModuleList(
            EncoderLayer(
                AttentionLayer(
                    FullAttention(False, hp["dropout"]), d, hp["n_heads"],
                    strict=False,
                ),
                d, hp["d_ff"], hp["dropout"],
            )
            for _ in range(hp["e_layers"])
        )
        self.head = nn.Linear(self.n_patches * d, T)

    def _channels(self, y, x, u, s):
        L = self.window.lookback
        u_l = u[:, :L].to(y.dtype)
        cal = torch.stack([u_l[..., 0] / (STEPS_PER_DAY - 1), u_l[..., 1] / 6.0], dim=1)
        stat = s.unsqueeze(-1).expand(-1, -1, L)
        return torch.cat(
            [y.unsqueeze(1), x.transpose(1, 2), cal, stat], dim=1
        )  # (B, 8, L)

    def forward(self, y, x, u, s):
        self.check_batch(y, x, u, s)
        B = y.shape[0]
        pl, st = self.hp["patch_len"], self.hp["stride"]
        chans = self.pad(self._channels(y, x, u, s))            # (B, 8, L+st)
        patches = chans.unfold(-1, pl, st)                      # (B, 8, N, pl)
        tok = self.dropout(self.patch_embed(patches) + self.pos_embed)
        tok = tok.reshape(B * N_CHANNELS, self.n_patches, -1)
        for layer in self.encoder:
            tok = layer(tok)
        out = self.head(tok.reshape(B, N_CHANNELS, -1))          # (B, 8, T)
        return out[:, 0].unsqueeze(-1)                           # load channel
