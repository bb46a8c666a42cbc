import numpy as np
import pytest

from loadbench.data import (
    BuildingRecord,
    LoadSeries,
    StaticFeatures,
    TimeIndices,
    WeatherSeries,
    WindowSpec,
)
from loadbench.synth import SynthSpec, generate


@pytest.fixture(scope="session")
def tiny_pool():
    return generate(SynthSpec(n_buildings=6, n_steps=900, n_types=3, seed=11))


# small-but-legal hyperparameters for every architecture, used wherever a
# full-size model would be wasteful
TOY_HP = {
    "lstm": {"hidden_size": 8, "num_layers": 1, "dropout": 0.0},
    "lstnet": {"conv_channels": 4, "kernel_size": 3, "rnn_hidden": 8,
               "skip_lengths": [2], "skip_hidden": 4, "attention_window": 3,
               "highway_window": 4, "dropout": 0.0},
    "transformer": {"d_model": 8, "n_heads": 2, "e_layers": 1, "d_layers": 1,
                    "d_ff": 16, "dropout": 0.0},
    "informer": {"d_model": 8, "n_heads": 2, "e_layers": 1, "d_layers": 1,
                 "d_ff": 16, "dropout": 0.0, "factor": 3},
    "autoformer": {"d_model": 8, "n_heads": 2, "e_layers": 1, "d_layers": 1,
                   "d_ff": 16, "dropout": 0.0, "moving_avg": 5, "factor": 3},
    "timesnet": {"d_model": 8, "e_layers": 1, "top_k": 2, "num_kernels": 2,
                 "d_hidden": 8, "dropout": 0.0},
    "patchtst": {"d_model": 8, "n_heads": 2, "e_layers": 1, "patch_len": 4,
                 "stride": 2, "d_ff": 16, "dropout": 0.0},
}


def make_batch(B: int, L: int, T: int, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    u = np.stack(
        [rng.integers(0, 96, (B, L + T)), rng.integers(0, 7, (B, L + T))],
        axis=-1,
    ).astype(np.int64)
    return {
        "y_hist": rng.normal(size=(B, L)),
        "x_hist": rng.normal(size=(B, L, 2)),
        "u_full": u,
        "s": np.abs(rng.normal(size=(B, 3))) + 0.5,
        "y_target": rng.normal(size=(B, T)),
    }


@pytest.fixture(scope="session")
def tiny_window():
    return WindowSpec(lookback=32, lookahead=4)


def make_record(bid: str, loads, temp=None, wind=None, static=None,
                start="2018-01-01") -> BuildingRecord:
    """Record with hand-picked series; weather defaults to zeros."""
    loads = np.asarray(loads, dtype=np.float64)
    n = len(loads)
    stamps = (np.datetime64(start, "s")
              + np.arange(n, dtype=np.int64) * np.timedelta64(900, "s"))
    temp = np.zeros(n) if temp is None else np.asarray(temp, dtype=np.float64)
    wind = np.zeros(n) if wind is None else np.asarray(wind, dtype=np.float64)
    static = static or StaticFeatures("Warehouse", 1000.0, 100.0, 10.0)
    return BuildingRecord(
        load=LoadSeries(bid, stamps, loads),
        weather=WeatherSeries(temp, wind),
        time=TimeIndices.from_timestamps(stamps),
        static=static,
    )
