"""Convolution-plus-recurrence baseline.

A 1-D convolution over time feeds a GRU, a temporal-attention readout over
the last few GRU states, and skip-recurrent pathways that model fixed
periodicities; an autoregressive highway on the raw load channel is added
to the network output.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import BadHyperparameters
from .base import ForecastModel
from .embed import StepFeatures

LSTNET_DEFAULTS = {
    "conv_channels": 32,
    "kernel_size": 12,
    "rnn_hidden": 128,
    "skip_lengths": [4, 4],
    "skip_hidden": 16,
    "attention_window": 7,
    "highway_window": 24,
    "dropout": 0.1,
}


class LSTNet(ForecastModel):
    arch = "lstnet"

    def __init__(self, window, hp):
        super().__init__(window, hp)
        L, T = window.lookback, window.lookahead
        ck, hc, hr = hp["kernel_size"], hp["conv_channels"], hp["rnn_hidden"]
        skips = list(hp["skip_lengths"])
        hs, aw, hw = hp["skip_hidden"], hp["attention_window"], hp["highway_window"]

        conv_len = L - ck + 1
        if conv_len < 1:
            raise BadHyperparameters(f"kernel {ck} exceeds lookback {L}")
        if conv_len < aw:
            raise BadHyperparameters(
                f"attention window {aw} exceeds conv output length {conv_len}"
            )
        for sk in skips:
            if sk < 1 or conv_len < sk:
                raise BadHyperparameters(f"skip length {sk} unusable at L={L}")
        if not 1 <= hw <= L:
            raise BadHyperparameters(f"highway window {hw} outside [1, {L}]")

        self.features = StepFeatures()
        self.conv = nn.Conv1d(self.features.out_dim, hc, kernel_size=ck)
        self.gru = nn.GRU(hc, hr, batch_first=True)
        self.skip_grus = nn.ModuleList(nn.GRU(hc, hs, batch_first=True) for _ in skips)
        self.skips = skips
        self.attention_window = aw
        self.highway_window = hw
        self.attn_score = nn.Linear(2 * hr, 1)
        self.out = nn.Linear(hr + hr + hs * sum(skips), T)
        self.highway = nn.Linear(hw, T)
        self.dropout = nn.Dropout(hp["dropout"])

    def forward(self, y, x, u, s):
        self.check_batch(y, x, u, s)
        B = y.shape[0]
        steps = self.features(y, x, u, s)                    # (B, L, F)
        c = F.relu(self.conv(steps.transpose(1, 2)))         # (B, C, conv_len)
        c = self.dropout(c)
        seq = c.transpose(1, 2)                              # (B, conv_len, C)

        states, _ = self.gru(seq)                            # (B, conv_len, H)
        h_last = self.dropout(states[:, -1])

        # Temporal attention over the trailing window of GRU states.
        recent = states[:, -self.attention_window:]          # (B, aw, H)
        paired = torch.cat(
            [recent, h_last.unsqueeze(1).expand(-1, recent.shape[1], -1)], dim=-1
        )
        score = torch.softmax(self.attn_score(torch.tanh(paired)).squeeze(-1), dim=1)
        context = torch.bmm(score.unsqueeze(1), recent).squeeze(1)  # (B, H)

        # Skip pathways: fold time so each sub-sequence strides one period.
        skip_feats = []
        for sk, gru in zip(self.skips, self.skip_grus):
            usable = (seq.shape[1] // sk) * sk
            z = seq[:, -usable:]                             # (B, n*sk, C)
            n = usable // sk
            z = z.view(B, n, sk, -1).transpose(1, 2).reshape(B * sk, n, -1)
            _, hz = gru(z)
            skip_feats.append(self.dropout(hz[-1].view(B, -1)))  # (B, sk*hs)

        out = self.out(torch.cat([h_last, context] + skip_feats, dim=1))

        ar = self.highway(y[:, -self.highway_window:])       # (B, T)
        return (out + ar).unsqueeze(-1)
