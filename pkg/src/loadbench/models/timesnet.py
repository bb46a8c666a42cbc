"""Period-folding architecture.

Each block estimates dominant periods from the FFT amplitude spectrum,
folds the token sequence into a (segments x period) grid per period, runs
inception-style 2-D convolutions on the grid, and blends the per-period
branches with amplitude-softmax weights. Period selection happens per
sample, so batched and per-sample forwards agree.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from .base import ForecastModel
from .embed import EmbeddingBlock

TIMESNET_DEFAULTS = {
    "d_model": 128,
    "e_layers": 3,
    "top_k": 5,
    "num_kernels": 3,
    "d_hidden": 64,
    "dropout": 0.1,
}


def detect_periods(x: torch.Tensor, k: int) -> tuple[torch.Tensor, torch.Tensor]:
    """Top-k periods per sample from the mean amplitude spectrum.

    x: (B, L, C) -> periods (B, k) long, amplitudes (B, k).
    The DC bin is excluded; period = L // frequency_index.
    """
    B, L, _ = x.shape
    amp = torch.fft.rfft(x, dim=1).abs().mean(-1)  # (B, n_freq)
    amp[:, 0] = -1.0  # never select the DC component
    k = min(k, amp.shape[1] - 1)
    values, idx = amp.topk(k, dim=1)
    return L // idx, values


class InceptionBlock(nn.Module):
    """Parallel odd-size 2-D convolutions (1, 3, 5, ...) averaged."""

    def __init__(self, in_channels: int, out_channels: int, num_kernels: int):
        super().__init__()
        self.convs = nn.ModuleList(
            nn.Conv2d(in_channels, out_channels, kernel_size=2 * i + 1, padding=i)
            for i in range(num_kernels)
        )

    def forward(self, x):
        return torch.stack([conv(x) for conv in self.convs], dim=0).mean(0)


class TimesBlock(nn.Module):
    def __init__(self, d_model: int, d_hidden: int, top_k: int, num_kernels: int):
        super().__init__()
        self.top_k = top_k
        self.conv = nn.Sequential(
            InceptionBlock(d_model, d_hidden, num_kernels),
            nn.GELU(),
            InceptionBlock(d_hidden, d_model, num_kernels),
        )

    def _fold_conv(self, x: torch.Tensor, period: int) -> torch.Tensor:
        # x: (R, L, d) -> pad to a multiple of period, fold, convolve, unfold
        R, L, d = x.shape
        n_seg = int(math.ceil(L / period))
        if n_seg * period > L:
            x = F.pad(x, (0, 0, 0, n_seg * period - L))
        grid = x.view(R, n_seg, period, d).permute(0, 3, 1, 2)
        out = self.conv(grid).permute(0, 2, 3, 1).reshape(R, n_seg * period, d)
        return out[:, :L]

    def forward(self, x):
        B, L, d = x.shape
        periods, amplitudes = detect_periods(x, self.top_k)
        k = periods.shape[1]
        branches = torch.zeros(B, k, L, d, dtype=x.dtype, device=x.device)
        for rank in range(k):
            for p in torch.unique(periods[:, rank]):
                rows = (periods[:, rank] == p).nonzero(as_tuple=True)[0]
                branches[rows, rank] = self._fold_conv(x[rows], int(p))
        weights = torch.softmax(amplitudes, dim=1)
        return (branches * weights.view(B, k, 1, 1)).sum(dim=1) + x


class TimesNet(ForecastModel):
    arch = "timesnet"

    def __init__(self, window, hp):
        super().__init__(window, hp)
        d = hp["d_model"]
        L, T = window.lookback, window.lookahead
        self.embed = EmbeddingBlock(d, L + T, hp["dropout"])
        self.blocks = nn.ModuleList(
            TimesBlock(d, hp["d_hidden"], hp["top_k"], hp["num_kernels"])
            for _ in range(hp["e_layers"])
        )
        self.norms = nn.ModuleList(nn.LayerNorm(d) for _ in range(hp["e_layers"]))
        self.time_head = nn.Linear(L, T)
        self.proj = nn.Linear(d, 1)

    def forward(self, y, x, u, s):
        self.check_batch(y, x, u, s)
        L = self.window.lookback
        cont = torch.cat([y.unsqueeze(-1), x], dim=-1)
        tok = self.embed(cont, u[:, :L], s, offset=0)
        for block, norm in zip(self.blocks, self.norms):
            tok = norm(block(tok))
        horizon = self.time_head(tok.transpose(1, 2)).transpose(1, 2)  # (B, T, d)
        return self.proj(horizon)
