"""Canonical data types, ingest, splitting, normalization, and windowing.

All series are aligned to a uniform 15-minute grid. A building's record
bundles its load, weather covariates, calendar indices, and static
features; downstream modules only ever see these types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
import pandas as pd

from .errors import (
    BadValue,
    DegenerateFeature,
    InsufficientData,
    MalformedSeries,
    MissingStaticFeatures,
    SchemaMismatch,
)

STEP_SECONDS = 15 * 60
STEPS_PER_DAY = 96

# The 14 commercial building types used for curation.
BUILDING_TYPES = (
    "FullServiceRestaurant",
    "Hospital",
    "LargeHotel",
    "LargeOffice",
    "MediumOffice",
    "Outpatient",
    "PrimarySchool",
    "QuickServiceRestaurant",
    "RetailStandalone",
    "RetailStripmall",
    "SecondarySchool",
    "SmallHotel",
    "SmallOffice",
    "Warehouse",
)

# Continuous features covered by the z-normalizer, in canonical order.
# Calendar indices stay integer-coded and are embedded inside the models.
CONTINUOUS_FEATURES = (
    "load_kwh",
    "dry_bulb_temp_c",
    "wind_speed_ms",
    "floor_space_ft2",
    "wall_area_m2",
    "window_area_m2",
)

TIMESERIES_COLUMNS = (
    "timestamp",
    "building_id",
    "load_kwh",
    "dry_bulb_temp_c",
    "wind_speed_ms",
)
STATIC_COLUMNS = (
    "building_id",
    "building_type",
    "floor_space_ft2",
    "wall_area_m2",
    "window_area_m2",
)


def canonical_building_type(label: str) -> str:
    """Map a raw type label onto the fixed registry (case/spacing tolerant)."""
    key = str(label).replace(" ", "").replace("_", "").replace("-", "").lower()
    for name in BUILDING_TYPES:
        if name.lower() == key:
            return name
    raise BadValue(f"unknown building type {label!r}; expected one of {BUILDING_TYPES}")


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class LoadSeries:
    """One building's load on the uniform 15-minute grid."""

    building_id: str
    timestamps: np.ndarray  # datetime64[s], strictly increasing, uniform
    values: np.ndarray      # kWh, float64

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype="datetime64[s]")
        vals = np.asarray(self.values, dtype=np.float64)
        if ts.ndim != 1 or vals.ndim != 1 or len(ts) != len(vals):
            raise MalformedSeries(
                f"{self.building_id}: timestamps and loads must be 1-D of equal length"
            )
        if len(ts) >= 2:
            deltas = np.diff(ts.astype("int64"))
            if not np.all(deltas == STEP_SECONDS):
                bad = int(np.argmax(deltas != STEP_SECONDS))
                raise MalformedSeries(
                    f"{self.building_id}: non-uniform spacing at row {bad + 1} "
                    f"(delta {int(deltas[bad])}s, expected {STEP_SECONDS}s)"
                )
        if not np.all(np.isfinite(vals)):
            raise BadValue(f"{self.building_id}: non-finite load value")
        object.__setattr__(self, "timestamps", _as_readonly(ts))
        object.__setattr__(self, "values", _as_readonly(vals))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class WeatherSeries:
    """Weather covariates aligned to the paired load series."""

    dry_bulb_temp_c: np.ndarray
    wind_speed_ms: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.dry_bulb_temp_c, dtype=np.float64)
        w = np.asarray(self.wind_speed_ms, dtype=np.float64)
        if t.ndim != 1 or w.ndim != 1 or len(t) != len(w):
            raise MalformedSeries("weather features must be 1-D of equal length")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(w))):
            raise BadValue("non-finite weather value")
        object.__setattr__(self, "dry_bulb_temp_c", _as_readonly(t))
        object.__setattr__(self, "wind_speed_ms", _as_readonly(w))

    def __len__(self) -> int:
        return len(self.dry_bulb_temp_c)

    def matrix(self) -> np.ndarray:
        """(N, 2) float matrix in canonical column order."""
        return np.stack([self.dry_bulb_temp_c, self.wind_speed_ms], axis=1)


@dataclass(frozen=True)
class TimeIndices:
    """Integer calendar indices: 15-minute slot of day [0,95], weekday [0,6]."""

    interval_of_day: np.ndarray
    day_of_week: np.ndarray

    def __post_init__(self):
        iod = np.asarray(self.interval_of_day, dtype=np.int64)
        dow = np.asarray(self.day_of_week, dtype=np.int64)
        if iod.ndim != 1 or dow.ndim != 1 or len(iod) != len(dow):
            raise MalformedSeries("time indices must be 1-D of equal length")
        if len(iod) and (iod.min() < 0 or iod.max() >= STEPS_PER_DAY):
            raise BadValue("interval_of_day outside [0, 95]")
        if len(dow) and (dow.min() < 0 or dow.max() > 6):
            raise BadValue("day_of_week outside [0, 6]")
        object.__setattr__(self, "interval_of_day", _as_readonly(iod))
        object.__setattr__(self, "day_of_week", _as_readonly(dow))

    def __len__(self) -> int:
        return len(self.interval_of_day)

    def matrix(self) -> np.ndarray:
        """(N, 2) int matrix [interval_of_day, day_of_week]."""
        return np.stack([self.interval_of_day, self.day_of_week], axis=1)

    @staticmethod
    def from_timestamps(timestamps: np.ndarray) -> "TimeIndices":
        idx = pd.DatetimeIndex(np.asarray(timestamps, dtype="datetime64[s]"))
        interval = (idx.hour * 4 + idx.minute // 15).to_numpy(dtype=np.int64)
        return TimeIndices(interval, idx.dayofweek.to_numpy(dtype=np.int64))


@dataclass(frozen=True)
class StaticFeatures:
    """Per-building constants: geometry plus the curation type label."""

    building_type: str
    floor_space_ft2: float
    wall_area_m2: float
    window_area_m2: float

    def __post_init__(self):
        object.__setattr__(
            self, "building_type", canonical_building_type(self.building_type)
        )
        for name in ("floor_space_ft2", "wall_area_m2", "window_area_m2"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0:
                raise BadValue(f"{name} must be finite and > 0, got {v}")
            object.__setattr__(self, name, v)

    def vector(self) -> np.ndarray:
        """(3,) float vector in canonical order."""
        return np.array(
            [self.floor_space_ft2, self.wall_area_m2, self.window_area_m2],
            dtype=np.float64,
        )


@dataclass(frozen=True)
class BuildingRecord:
    """All sequences of one building, sharing a single length N."""

    load: LoadSeries
    weather: WeatherSeries
    time: TimeIndices
    static: StaticFeatures

    def __post_init__(self):
        n = len(self.load)
        if len(self.weather) != n or len(self.time) != n:
            raise MalformedSeries(
                f"{self.building_id}: load/weather/time lengths differ "
                f"({n}/{len(self.weather)}/{len(self.time)})"
            )

    @property
    def building_id(self) -> str:
        return self.load.building_id

    @property
    def n_steps(self) -> int:
        return len(self.load)

    def slice(self, start: int, stop: int) -> "BuildingRecord":
        """Contiguous sub-record on [start, stop)."""
        return BuildingRecord(
            load=LoadSeries(
                self.load.building_id,
                self.load.timestamps[start:stop],
                self.load.values[start:stop],
            ),
            weather=WeatherSeries(
                self.weather.dry_bulb_temp_c[start:stop],
                self.weather.wind_speed_ms[start:stop],
            ),
            time=TimeIndices(
                self.time.interval_of_day[start:stop],
                self.time.day_of_week[start:stop],
            ),
            static=self.static,
        )


@dataclass(frozen=True)
class SplitSpec:
    """Chronological train/val/test fractions (default 0.8/0.1/0.1)."""

    train_frac: float = 0.8
    val_frac: float = 0.1
    test_frac: float = 0.1

    def __post_init__(self):
        for name in ("train_frac", "val_frac", "test_frac"):
            f = float(getattr(self, name))
            if not 0.0 < f < 1.0:
                raise BadValue(f"{name} must lie in (0, 1), got {f}")
            object.__setattr__(self, name, f)
        total = self.train_frac + self.val_frac + self.test_frac
        if abs(total - 1.0) > 1e-12:
            raise BadValue(f"split fractions must sum to 1, got {total!r}")


@dataclass(frozen=True)
class WindowSpec:
    """Lookback length L and forecast horizon T, in 15-minute steps."""

    lookback: int = 512
    lookahead: int = 96

    def __post_init__(self):
        if int(self.lookback) < 1 or int(self.lookahead) < 1:
            raise BadValue("lookback and lookahead must be >= 1")
        object.__setattr__(self, "lookback", int(self.lookback))
        object.__setattr__(self, "lookahead", int(self.lookahead))


@dataclass(frozen=True)
class WindowSample:
    """One supervised sample.

    y_hist:   (L,)      past loads
    x_hist:   (L, 2)    past weather
    u_full:   (L+T, 2)  calendar indices over lookback and horizon
    s:        (3,)      static features
    y_target: (T,)      future loads, immediately following y_hist
    """

    y_hist: np.ndarray
    x_hist: np.ndarray
    u_full: np.ndarray
    s: np.ndarray
    y_target: np.ndarray


# --------------------------------------------------------------------------
# ingest
# --------------------------------------------------------------------------

def ingest(timeseries_file, static_file) -> list[BuildingRecord]:
    """Read the two CSV exports into one validated record per building.

    Rows may arrive in any order; they are grouped by building and sorted
    by timestamp. Gaps, duplicate timestamps, non-finite or negative loads,
    and buildings without a static row are rejected outright - no
    imputation happens here.
    """
    # round_trip parsing keeps write -> ingest lossless for float64
    ts_df = pd.read_csv(timeseries_file, float_precision="round_trip")
    missing = set(TIMESERIES_COLUMNS) - set(ts_df.columns)
    if missing:
        raise MalformedSeries(f"time-series file missing columns {sorted(missing)}")
    st_df = pd.read_csv(static_file, float_precision="round_trip")
    missing = set(STATIC_COLUMNS) - set(st_df.columns)
    if missing:
        raise MalformedSeries(f"static file missing columns {sorted(missing)}")

    st_df = st_df.astype({"building_id": str})
    dup = st_df["building_id"].duplicated()
    if dup.any():
        raise MalformedSeries(
            f"duplicate static rows for {sorted(st_df['building_id'][dup])}"
        )
    statics = {
        row.building_id: StaticFeatures(
            building_type=row.building_type,
            floor_space_ft2=row.floor_space_ft2,
            wall_area_m2=row.wall_area_m2,
            window_area_m2=row.window_area_m2,
        )
        for row in st_df.itertuples(index=False)
    }

    ts_df = ts_df.astype({"building_id": str})
    try:
        ts_df["timestamp"] = pd.to_datetime(ts_df["timestamp"], format="ISO8601")
    except (ValueError, TypeError) as exc:
        raise MalformedSeries(f"unparseable timestamp: {exc}") from exc

    records = []
    for bid, group in ts_df.groupby("building_id", sort=True):
        if bid not in statics:
            raise MissingStaticFeatures(f"no static row for building {bid!r}")
        group = group.sort_values("timestamp")
        stamps = group["timestamp"].to_numpy(dtype="datetime64[s]")
        if len(stamps) >= 2 and (np.diff(stamps.astype("int64")) == 0).any():
            raise MalformedSeries(f"{bid}: duplicate timestamp")
        loads = group["load_kwh"].to_numpy(dtype=np.float64)
        if not np.all(np.isfinite(loads)):
            raise BadValue(f"{bid}: non-finite load")
        if (loads < 0).any():
            raise BadValue(f"{bid}: negative load")
        records.append(
            BuildingRecord(
                load=LoadSeries(bid, stamps, loads),
                weather=WeatherSeries(
                    group["dry_bulb_temp_c"].to_numpy(dtype=np.float64),
                    group["wind_speed_ms"].to_numpy(dtype=np.float64),
                ),
                time=TimeIndices.from_timestamps(stamps),
                static=statics[bid],
            )
        )
    return records


def write_dataset_csv(records: Sequence[BuildingRecord], timeseries_file, static_file):
    """Serialize records back to the two ingest schemas."""
    frames = []
    static_rows = []
    for rec in sorted(records, key=lambda r: r.building_id):
        frames.append(
            pd.DataFrame(
                {
                    "timestamp": pd.DatetimeIndex(rec.load.timestamps).strftime(
                        "%Y-%m-%dT%H:%M:%S"
                    ),
                    "building_id": rec.building_id,
                    "load_kwh": rec.load.values,
                    "dry_bulb_temp_c": rec.weather.dry_bulb_temp_c,
                    "wind_speed_ms": rec.weather.wind_speed_ms,
                }
            )
        )
        static_rows.append(
            {
                "building_id": rec.building_id,
                "building_type": rec.static.building_type,
                "floor_space_ft2": rec.static.floor_space_ft2,
                "wall_area_m2": rec.static.wall_area_m2,
                "window_area_m2": rec.static.window_area_m2,
            }
        )
    pd.concat(frames, ignore_index=True).to_csv(timeseries_file, index=False)
    pd.DataFrame(static_rows).to_csv(static_file, index=False)


# --------------------------------------------------------------------------
# split
# --------------------------------------------------------------------------

def split(
    record: BuildingRecord, spec: SplitSpec = SplitSpec()
) -> tuple[BuildingRecord, BuildingRecord, BuildingRecord]:
    """Chronological train/val/test segments.

    Train takes floor(N * train_frac) steps, val floor(N * val_frac), test
    the remainder, so the three segments tile the record exactly.
    """
    n = record.n_steps
    if n < 10:
        raise InsufficientData(f"{record.building_id}: need >= 10 steps, have {n}")
    n_train = math.floor(n * spec.train_frac)
    n_val = math.floor(n * spec.val_frac)
    return (
        record.slice(0, n_train),
        record.slice(n_train, n_train + n_val),
        record.slice(n_train + n_val, n),
    )


# --------------------------------------------------------------------------
# normalization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NormStats:
    """Feature-wise z-normalization statistics fitted on the train split.

    ``scope`` is "global" (one stat set over all buildings, the default) or
    "per_building". ``sigma_y`` is the raw-kWh load std used as the metric
    normalizer in physical space; in normalized space the corresponding
    normalizer is ``sigma_y_normalized`` (1 up to floating point).
    """

    scope: str
    mean: dict[str, float] = field(default_factory=dict)
    std: dict[str, float] = field(default_factory=dict)
    per_building: dict[str, tuple[dict[str, float], dict[str, float]]] = field(
        default_factory=dict
    )
    sigma_y: float = 0.0
    sigma_y_normalized: float = 1.0

    def stats_for(self, building_id: str) -> tuple[dict[str, float], dict[str, float]]:
        if self.scope == "global":
            return self.mean, self.std
        try:
            return self.per_building[building_id]
        except KeyError:
            raise SchemaMismatch(
                f"no per-building stats for {building_id!r}"
            ) from None

    def metric_sigma(self, space: str = "normalized") -> float:
        if space == "normalized":
            return self.sigma_y_normalized
        if space == "physical":
            return self.sigma_y
        raise BadValue(f"unknown metric space {space!r}")

    def to_dict(self) -> dict:
        return {
            "scope": self.scope,
            "mean": dict(self.mean),
            "std": dict(self.std),
            "per_building": {
                k: [dict(m), dict(s)] for k, (m, s) in self.per_building.items()
            },
            "sigma_y": self.sigma_y,
            "sigma_y_normalized": self.sigma_y_normalized,
        }

    @staticmethod
    def from_dict(d: dict) -> "NormStats":
        return NormStats(
            scope=d["scope"],
            mean=dict(d.get("mean", {})),
            std=dict(d.get("std", {})),
            per_building={
                k: (dict(m), dict(s))
                for k, (m, s) in d.get("per_building", {}).items()
            },
            sigma_y=float(d["sigma_y"]),
            sigma_y_normalized=float(d.get("sigma_y_normalized", 1.0)),
        )


_STATIC_NAMES = ("floor_space_ft2", "wall_area_m2", "window_area_m2")
_SERIES_NAMES = ("load_kwh", "dry_bulb_temp_c", "wind_speed_ms")


def _series_columns(record: BuildingRecord) -> dict[str, np.ndarray]:
    return {
        "load_kwh": record.load.values,
        "dry_bulb_temp_c": record.weather.dry_bulb_temp_c,
        "wind_speed_ms": record.weather.wind_speed_ms,
    }


def _fit_one(columns: dict[str, np.ndarray]) -> tuple[dict, dict]:
    mean, std = {}, {}
    for name, col in columns.items():
        if col.size < 2:
            raise InsufficientData(f"need >= 2 observations to fit {name}")
        mu = float(np.mean(col))
        sigma = float(np.std(col))  # population std
        if sigma <= 0.0:
            raise DegenerateFeature(f"feature {name} has zero std on the train split")
        mean[name] = mu
        std[name] = sigma
    return mean, std


def _fit_statics(train_segments: Sequence[BuildingRecord]) -> tuple[dict, dict]:
    """Static-feature stats pooled across buildings.

    Statics are per-building constants, so their spread only exists across
    the pool. A zero-spread static (identical geometry everywhere) carries
    no signal; it centers to zero under std 1 rather than failing the fit.
    """
    mean, std = {}, {}
    for name in _STATIC_NAMES:
        vals = np.array(
            [getattr(rec.static, name) for rec in train_segments], dtype=np.float64
        )
        mean[name] = float(vals.mean())
        sigma = float(vals.std())
        std[name] = sigma if sigma > 0.0 else 1.0
    return mean, std


def fit_normalizer(
    train_segments: Sequence[BuildingRecord], scope: str = "global"
) -> NormStats:
    """Fit per-feature mean/std (population) on the train data.

    Global scope pools every building's series into one stat set, which
    keeps the metric normalizer a single scalar; per-building scope fits
    one stat set per building. Static features pool across buildings in
    both scopes (within one building they are constants).
    """
    if not train_segments:
        raise InsufficientData("no train segments")
    static_mean, static_std = _fit_statics(train_segments)
    if scope == "global":
        pooled = {name: [] for name in _SERIES_NAMES}
        for rec in train_segments:
            for name, col in _series_columns(rec).items():
                pooled[name].append(col)
        columns = {name: np.concatenate(cols) for name, cols in pooled.items()}
        mean, std = _fit_one(columns)
        mean.update(static_mean)
        std.update(static_std)
        z = (columns["load_kwh"] - mean["load_kwh"]) / std["load_kwh"]
        return NormStats(
            scope="global",
            mean=mean,
            std=std,
            sigma_y=std["load_kwh"],
            sigma_y_normalized=float(np.std(z)),
        )
    if scope == "per_building":
        per = {}
        z_parts = []
        raw_parts = []
        for rec in train_segments:
            mean, std = _fit_one(_series_columns(rec))
            mean.update(static_mean)
            std.update(static_std)
            per[rec.building_id] = (mean, std)
            z_parts.append((rec.load.values - mean["load_kwh"]) / std["load_kwh"])
            raw_parts.append(rec.load.values)
        raw = np.concatenate(raw_parts)
        return NormStats(
            scope="per_building",
            per_building=per,
            sigma_y=float(np.std(raw)),
            sigma_y_normalized=float(np.std(np.concatenate(z_parts))),
        )
    raise BadValue(f"unknown normalization scope {scope!r}")


class _NormalizedStatic(StaticFeatures):
    """Static features in z-space (values may be <= 0 after centering)."""

    def __post_init__(self):  # skip the positivity check, keep the label check
        object.__setattr__(
            self, "building_type", canonical_building_type(self.building_type)
        )
        for name in ("floor_space_ft2", "wall_area_m2", "window_area_m2"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise BadValue(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)


def apply_normalizer(record: BuildingRecord, stats: NormStats) -> BuildingRecord:
    """z-score every continuous feature; calendar indices pass through."""
    mean, std = stats.stats_for(record.building_id)
    if set(mean) != set(CONTINUOUS_FEATURES):
        raise SchemaMismatch(
            f"stats cover {sorted(mean)}, expected {sorted(CONTINUOUS_FEATURES)}"
        )

    def z(name, values):
        return (np.asarray(values, dtype=np.float64) - mean[name]) / std[name]

    return BuildingRecord(
        load=LoadSeries(
            record.building_id, record.load.timestamps, z("load_kwh", record.load.values)
        ),
        weather=WeatherSeries(
            z("dry_bulb_temp_c", record.weather.dry_bulb_temp_c),
            z("wind_speed_ms", record.weather.wind_speed_ms),
        ),
        time=record.time,
        static=_NormalizedStatic(
            building_type=record.static.building_type,
            floor_space_ft2=float(z("floor_space_ft2", record.static.floor_space_ft2)),
            wall_area_m2=float(z("wall_area_m2", record.static.wall_area_m2)),
            window_area_m2=float(z("window_area_m2", record.static.window_area_m2)),
        ),
    )


def denormalize_loads(
    values: np.ndarray, stats: NormStats, building_id: str | None = None
) -> np.ndarray:
    """Inverse of the load z-score: v * std + mean."""
    if stats.scope == "per_building" and building_id is None:
        raise SchemaMismatch("per-building stats need a building_id to invert")
    mean, std = stats.stats_for(building_id if building_id is not None else "")
    return np.asarray(values, dtype=np.float64) * std["load_kwh"] + mean["load_kwh"]


# --------------------------------------------------------------------------
# windowing
# --------------------------------------------------------------------------

def window_count(n_steps: int, spec: WindowSpec) -> int:
    """Number of stride-1 windows in a segment of length n_steps."""
    return n_steps - spec.lookback - spec.lookahead + 1


def windows(segment: BuildingRecord, spec: WindowSpec) -> Iterator[WindowSample]:
    """Stream the N - L - T + 1 supervised samples of one segment."""
    n = segment.n_steps
    count = window_count(n, spec)
    if count < 1:
        raise InsufficientData(
            f"{segment.building_id}: segment of {n} steps cannot fit "
            f"L+T = {spec.lookback + spec.lookahead}"
        )
    x = segment.weather.matrix()
    u = segment.time.matrix()
    s = segment.static.vector()
    y = segment.load.values
    L, T = spec.lookback, spec.lookahead
    for i in range(count):
        yield WindowSample(
            y_hist=y[i : i + L],
            x_hist=x[i : i + L],
            u_full=u[i : i + L + T],
            s=s,
            y_target=y[i + L : i + L + T],
        )


class WindowSet:
    """Random-access view over the windows of many segments.

    Enumeration order is building-major (segment order as given, which the
    pipeline keeps sorted by building_id) and time-minor, matching the
    row order of exported forecast files.
    """

    def __init__(self, segments: Sequence[BuildingRecord], spec: WindowSpec):
        self.spec = spec
        self.segments = list(segments)
        counts = []
        for seg in self.segments:
            c = window_count(seg.n_steps, spec)
            if c < 1:
                raise InsufficientData(
                    f"{seg.building_id}: {seg.n_steps} steps < L+T "
                    f"= {spec.lookback + spec.lookahead}"
                )
            counts.append(c)
        self._counts = np.asarray(counts, dtype=np.int64)
        self._offsets = np.concatenate([[0], np.cumsum(self._counts)])
        self._x = [seg.weather.matrix() for seg in self.segments]
        self._u = [seg.time.matrix() for seg in self.segments]
        self._s = [seg.static.vector() for seg in self.segments]

    def __len__(self) -> int:
        return int(self._offsets[-1])

    def locate(self, index: int) -> tuple[int, int]:
        """Map a global window index to (segment index, start position)."""
        if index < 0 or index >= len(self):
            raise IndexError(index)
        seg = int(np.searchsorted(self._offsets, index, side="right") - 1)
        return seg, int(index - self._offsets[seg])

    def segment_bounds(self, seg_index: int) -> tuple[int, int]:
        """Global [start, stop) window-index range of one segment."""
        return int(self._offsets[seg_index]), int(self._offsets[seg_index + 1])

    def gather(self, indices: np.ndarray) -> dict[str, np.ndarray]:
        """Assemble a batch for the given global window indices."""
        L, T = self.spec.lookback, self.spec.lookahead
        b = len(indices)
        y_hist = np.empty((b, L), dtype=np.float64)
        x_hist = np.empty((b, L, 2), dtype=np.float64)
        u_full = np.empty((b, L + T, 2), dtype=np.int64)
        s = np.empty((b, 3), dtype=np.float64)
        y_target = np.empty((b, T), dtype=np.float64)
        for row, idx in enumerate(np.asarray(indices, dtype=np.int64)):
            si, pos = self.locate(int(idx))
            seg = self.segments[si]
            y_hist[row] = seg.load.values[pos : pos + L]
            x_hist[row] = self._x[si][pos : pos + L]
            u_full[row] = self._u[si][pos : pos + L + T]
            s[row] = self._s[si]
            y_target[row] = seg.load.values[pos + L : pos + L + T]
        return {
            "y_hist": y_hist,
            "x_hist": x_hist,
            "u_full": u_full,
            "s": s,
            "y_target": y_target,
        }

    def targets(self) -> np.ndarray:
        """(n_windows, T) target matrix in enumeration order."""
        return self.gather(np.arange(len(self)))["y_target"]
