"""Benchmark toolkit for short-term building-load forecasting.

Covers the full desk-scale loop: synthesize or ingest building pools,
curate subsets with controlled type diversity, rank input features by
load correlation, train seven forecasting architectures under one
protocol, and score forecasts with normalized errors. See the CLI
(``loadbench --help``) for the pipeline entry point.
"""

from .curation import (
    CurationSpec,
    CuratedDataset,
    apportion,
    correlation_report,
    curate,
    heterogeneity_report,
    pearson,
    select_features,
    static_correlations,
    weather_correlations,
)
from .data import (
    BuildingRecord,
    LoadSeries,
    NormStats,
    SplitSpec,
    StaticFeatures,
    TimeIndices,
    WeatherSeries,
    WindowSet,
    WindowSpec,
    apply_normalizer,
    denormalize_loads,
    fit_normalizer,
    ingest,
    split,
    window_count,
    windows,
    write_dataset_csv,
)
from .errors import LoadBenchError
from .metrics import MetricAccumulator, MetricConfig, nmae, nmse
from .models import (
    ARCHITECTURES,
    build,
    count_parameters,
    default_hyperparameters,
    load_checkpoint,
    save_checkpoint,
)
from .synth import SynthSpec, generate
from .training import (
    DEFAULT_LR_GRID,
    EarlyStopper,
    GridSearchResult,
    TrainConfig,
    TrainLog,
    evaluate,
    grid_search,
    predict,
    simulate_early_stopping,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ARCHITECTURES",
    "BuildingRecord",
    "CuratedDataset",
    "CurationSpec",
    "DEFAULT_LR_GRID",
    "EarlyStopper",
    "GridSearchResult",
    "LoadBenchError",
    "LoadSeries",
    "MetricAccumulator",
    "MetricConfig",
    "NormStats",
    "SplitSpec",
    "StaticFeatures",
    "SynthSpec",
    "TimeIndices",
    "TrainConfig",
    "TrainLog",
    "WeatherSeries",
    "WindowSet",
    "WindowSpec",
    "apply_normalizer",
    "apportion",
    "build",
    "correlation_report",
    "count_parameters",
    "curate",
    "default_hyperparameters",
    "denormalize_loads",
    "evaluate",
    "fit_normalizer",
    "generate",
    "grid_search",
    "heterogeneity_report",
    "ingest",
    "load_checkpoint",
    "nmae",
    "nmse",
    "pearson",
    "predict",
    "save_checkpoint",
    "select_features",
    "simulate_early_stopping",
    "split",
    "static_correlations",
    "train",
    "weather_correlations",
    "window_count",
    "windows",
    "write_dataset_csv",
]
