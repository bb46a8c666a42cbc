"""Recurrent baseline: LSTM encoder over the per-step feature vector with a
dense decoder from the final hidden state to the horizon."""

from __future__ import annotations

import torch.nn as nn

from .base import ForecastModel
from .embed import StepFeatures

LSTM_DEFAULTS = {
    "hidden_size": 32,
    "num_layers": 1,
    "dropout": 0.1,
}


class LSTMForecaster(ForecastModel):
    arch = "lstm"

    def __init__(self, window, hp):
        super().__init__(window, hp)
        self.features = StepFeatures()
        # Inter-layer dropout only exists for stacked LSTMs; with one layer
        # the configured rate is applied to the final hidden state instead.
        layers = hp["num_layers"]
        self.lstm = nn.LSTM(
            input_size=self.features.out_dim,
            hidden_size=hp["hidden_size"],
            num_layers=layers,
            batch_first=True,
            dropout=hp["dropout"] if layers > 1 else 0.0,
        )
        self.dropout = nn.Dropout(hp["dropout"])
        self.decoder = nn.Linear(hp["hidden_size"], window.lookahead)

    def forward(self, y, x, u, s):
        self.check_batch(y, x, u, s)
        steps = self.features(y, x, u, s)
        _, (h, _) = self.lstm(steps)
        return self.decoder(self.dropout(h[-1])).unsqueeze(-1)
