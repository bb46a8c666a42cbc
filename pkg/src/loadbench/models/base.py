"""Shared model contract.

Every architecture consumes the same four tensors and emits (batch, T, 1):

    y: (B, L)       past loads
    x: (B, L, 2)    past weather [dry bulb, wind speed]
    u: (B, L+T, 2)  calendar indices [interval_of_day, day_of_week],
                    known through the end of the horizon
    s: (B, 3)       static features [floor space, wall area, window area]
"""

from __future__ import annotations

import torch
import torch.nn as nn

from ..data import WindowSpec
from ..errors import ShapeError

N_WEATHER = 2
N_STATIC = 3
N_CONTINUOUS = 1 + N_WEATHER  # load plus weather, jointly projected


class ForecastModel(nn.Module):
    """Base class carrying the architecture tag, hp dict, and window spec."""

    arch: str = "?"

    def __init__(self, window: WindowSpec, hp: dict):
        super().__init__()
        self.window = window
        self.hp = dict(hp)

    def check_batch(self, y, x, u, s):
        L, T = self.window.lookback, self.window.lookahead
        b = y.shape[0]
        if y.shape != (b, L):
            raise ShapeError(f"y must be ({b}, {L}), got {tuple(y.shape)}")
        if x.shape != (b, L, N_WEATHER):
            raise ShapeError(f"x must be ({b}, {L}, {N_WEATHER}), got {tuple(x.shape)}")
        if u.shape != (b, L + T, 2):
            raise ShapeError(f"u must be ({b}, {L + T}, 2), got {tuple(u.shape)}")
        if s.shape != (b, N_STATIC):
            raise ShapeError(f"s must be ({b}, {N_STATIC}), got {tuple(s.shape)}")


def batch_to_tensors(batch: dict, dtype=torch.float32, device=None):
    """Convert a gathered numpy batch to model-ready tensors."""
    y = torch.as_tensor(batch["y_hist"], dtype=dtype, device=device)
    x = torch.as_tensor(batch["x_hist"], dtype=dtype, device=device)
    u = torch.as_tensor(batch["u_full"], dtype=torch.long, device=device)
    s = torch.as_tensor(batch["s"], dtype=dtype, device=device)
    target = torch.as_tensor(batch["y_target"], dtype=dtype, device=device)
    return y, x, u, s, target
