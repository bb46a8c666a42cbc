"""Dataset curation: heterogeneity-controlled subsets, correlation-based
feature selection, and dataset statistics.

The two stock recipes are a type-stratified subset that mirrors the pool's
building-type mix, and a single-type subset. Feature selection ranks
candidate covariates by Pearson correlation with the load.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .data import BuildingRecord, canonical_building_type
from .errors import (
    BadValue,
    InsufficientData,
    PoolTooSmall,
    SelectionOverflow,
    UndefinedCorrelation,
)

log = logging.getLogger(__name__)

HETEROGENEOUS = "heterogeneous"
HOMOGENEOUS = "homogeneous"

DEFAULT_WEATHER_FEATURES = ("dry_bulb_temp_c", "wind_speed_ms")
DEFAULT_STATIC_FEATURES = ("floor_space_ft2", "wall_area_m2", "window_area_m2")


@dataclass(frozen=True)
class CurationSpec:
    """How to draw a subset from a building pool.

    ``heterogeneous`` matches the pool's building-type proportions via
    largest-remainder apportionment; ``homogeneous`` draws only from
    ``building_type``. Sampling within a type is uniform without
    replacement, seeded by ``random_seed``.
    """

    target_count: int
    mode: str = HETEROGENEOUS
    building_type: str = "Warehouse"
    random_seed: int = 0

    def __post_init__(self):
        if int(self.target_count) < 1:
            raise BadValue("target_count must be >= 1")
        object.__setattr__(self, "target_count", int(self.target_count))
        if self.mode not in (HETEROGENEOUS, HOMOGENEOUS):
            raise BadValue(f"mode must be {HETEROGENEOUS!r} or {HOMOGENEOUS!r}")
        object.__setattr__(
            self, "building_type", canonical_building_type(self.building_type)
        )


@dataclass(frozen=True)
class CuratedDataset:
    records: list[BuildingRecord]
    spec: CurationSpec

    @property
    def building_ids(self) -> list[str]:
        return [r.building_id for r in self.records]

    def manifest(self) -> dict:
        return {
            "building_ids": self.building_ids,
            "seed": self.spec.random_seed,
            "spec": {
                "target_count": self.spec.target_count,
                "mode": self.spec.mode,
                "building_type": self.spec.building_type,
            },
        }

    def __len__(self) -> int:
        return len(self.records)


def apportion(pool_counts: Mapping[str, int], total: int) -> dict[str, int]:
    """Largest-remainder allocation of ``total`` against pool proportions.

    Each type gets the floor of its exact proportional share; leftovers go
    to the largest fractional remainders, ties broken lexicographically by
    type name. Allocations sum to ``total`` exactly and never exceed a
    type's pool count.
    """
    names = sorted(pool_counts)
    counts = np.array([pool_counts[n] for n in names], dtype=np.int64)
    if (counts < 0).any():
        raise BadValue("pool counts must be >= 0")
    pool_total = int(counts.sum())
    if total > pool_total:
        raise PoolTooSmall(f"requested {total} buildings from a pool of {pool_total}")
    if pool_total == 0:
        return {n: 0 for n in names}
    quotas = total * counts / pool_total
    alloc = np.floor(quotas).astype(np.int64)
    remainders = quotas - alloc
    leftover = total - int(alloc.sum())
    order = sorted(range(len(names)), key=lambda i: (-remainders[i], names[i]))
    for i in order[:leftover]:
        alloc[i] += 1
    return {n: int(a) for n, a in zip(names, alloc)}


def curate(pool: Sequence[BuildingRecord], spec: CurationSpec) -> CuratedDataset:
    """Draw a curated subset. Deterministic given (pool contents, spec)."""
    by_id = {}
    for rec in pool:
        if rec.building_id in by_id:
            raise BadValue(f"duplicate building_id {rec.building_id!r} in pool")
        by_id[rec.building_id] = rec

    by_type: dict[str, list[str]] = {}
    for bid in sorted(by_id):
        by_type.setdefault(by_id[bid].static.building_type, []).append(bid)

    rng = np.random.default_rng(spec.random_seed)
    if spec.mode == HOMOGENEOUS:
        ids = by_type.get(spec.building_type, [])
        if len(ids) < spec.target_count:
            raise PoolTooSmall(
                f"{len(ids)} {spec.building_type} buildings in pool, "
                f"need {spec.target_count}"
            )
        allocations = {spec.building_type: spec.target_count}
    else:
        allocations = apportion(
            {t: len(ids) for t, ids in by_type.items()}, spec.target_count
        )

    chosen: list[str] = []
    for t in sorted(allocations):
        ids = by_type.get(t, [])
        take = allocations[t]
        if take == 0:
            continue
        picked = rng.choice(len(ids), size=take, replace=False)
        chosen.extend(ids[i] for i in picked)
    chosen.sort()
    return CuratedDataset(records=[by_id[b] for b in chosen], spec=spec)


# --------------------------------------------------------------------------
# statistics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeSpread:
    """Five-number summary of one type's pooled load observations."""

    count: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float

    def __post_init__(self):
        q = (self.minimum, self.q1, self.median, self.q3, self.maximum)
        if any(a > b for a, b in zip(q, q[1:])):
            raise BadValue(f"quartiles out of order: {q}")


@dataclass(frozen=True)
class HeterogeneityReport:
    type_counts: dict[str, int]
    type_spread: dict[str, TypeSpread]
    pooled_mean: float
    pooled_std: float
    n_buildings: int
    n_observations: int

    def __post_init__(self):
        if sum(self.type_counts.values()) != self.n_buildings:
            raise BadValue("type counts do not sum to the dataset size")


def heterogeneity_report(dataset: CuratedDataset) -> HeterogeneityReport:
    """Pooled load mean/std plus per-type five-number load summaries."""
    if not dataset.records:
        raise InsufficientData("empty dataset")
    counts: dict[str, int] = {}
    per_type: dict[str, list[np.ndarray]] = {}
    for rec in dataset.records:
        t = rec.static.building_type
        counts[t] = counts.get(t, 0) + 1
        per_type.setdefault(t, []).append(rec.load.values)
    spreads = {}
    total = 0
    acc_sum = 0.0
    acc_sq = 0.0
    for t in sorted(per_type):
        vals = np.concatenate(per_type[t])
        q1, med, q3 = np.quantile(vals, [0.25, 0.5, 0.75])
        spreads[t] = TypeSpread(
            count=counts[t],
            minimum=float(vals.min()),
            q1=float(q1),
            median=float(med),
            q3=float(q3),
            maximum=float(vals.max()),
        )
        total += vals.size
        acc_sum += float(vals.sum())
        acc_sq += float(np.dot(vals, vals))
    mean = acc_sum / total
    var = max(acc_sq / total - mean * mean, 0.0)
    return HeterogeneityReport(
        type_counts=counts,
        type_spread=spreads,
        pooled_mean=mean,
        pooled_std=math.sqrt(var),
        n_buildings=len(dataset.records),
        n_observations=total,
    )


# --------------------------------------------------------------------------
# correlation feature selection
# --------------------------------------------------------------------------

def pearson(a, b) -> float:
    """Population Pearson correlation of two equal-length 1-D arrays."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise BadValue(f"need equal-length 1-D inputs, got {a.shape} vs {b.shape}")
    if a.size < 2:
        raise InsufficientData("need >= 2 observations for a correlation")
    sa = float(np.std(a))
    sb = float(np.std(b))
    if sa == 0.0 or sb == 0.0:
        raise UndefinedCorrelation("zero-variance input")
    r = float(np.mean((a - a.mean()) * (b - b.mean())) / (sa * sb))
    return min(1.0, max(-1.0, r))


def weather_correlations(
    pool: Sequence[BuildingRecord],
    features: Mapping[str, Sequence[np.ndarray]] | None = None,
) -> dict[str, float]:
    """Per-feature Pearson r with load, averaged uniformly over buildings.

    ``features`` maps a feature name to one series per building, aligned
    with ``pool``; by default the record's own weather channels are used.
    Buildings where the load or the feature has zero variance are dropped
    from that feature's average with a warning.
    """
    if not pool:
        raise InsufficientData("empty pool")
    if features is None:
        features = {
            "dry_bulb_temp_c": [r.weather.dry_bulb_temp_c for r in pool],
            "wind_speed_ms": [r.weather.wind_speed_ms for r in pool],
        }
    for name, series in features.items():
        if len(series) != len(pool):
            raise BadValue(f"feature {name!r} has {len(series)} series for "
                           f"{len(pool)} buildings")
    out = {}
    for name in sorted(features):
        rs = []
        for rec, series in zip(pool, features[name]):
            try:
                rs.append(pearson(series, rec.load.values))
            except UndefinedCorrelation:
                log.warning(
                    "excluding %s from the %s average: zero variance",
                    rec.building_id, name,
                )
        if not rs:
            raise UndefinedCorrelation(f"no building admits a correlation for {name!r}")
        out[name] = float(np.mean(rs))
    return out


def static_correlations(
    pool: Sequence[BuildingRecord],
    features: Mapping[str, Sequence[float]] | None = None,
) -> dict[str, float]:
    """Pearson r of time-averaged load against each static feature."""
    if len(pool) < 3:
        raise InsufficientData("need >= 3 buildings for cross-building correlations")
    if features is None:
        features = {
            "floor_space_ft2": [r.static.floor_space_ft2 for r in pool],
            "wall_area_m2": [r.static.wall_area_m2 for r in pool],
            "window_area_m2": [r.static.window_area_m2 for r in pool],
        }
    avg_load = np.array([float(np.mean(r.load.values)) for r in pool])
    out = {}
    for name in sorted(features):
        vals = np.asarray(features[name], dtype=np.float64)
        if vals.shape != avg_load.shape:
            raise BadValue(f"feature {name!r} has {vals.size} values for "
                           f"{avg_load.size} buildings")
        try:
            out[name] = pearson(avg_load, vals)
        except UndefinedCorrelation:
            raise UndefinedCorrelation(
                f"static feature {name!r} has zero variance across buildings"
            ) from None
    return out


@dataclass(frozen=True)
class CorrelationReport:
    """Signed coefficients per candidate feature, each in [-1, 1]."""

    weather: dict[str, float] = field(default_factory=dict)
    static: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for group in (self.weather, self.static):
            for name, r in group.items():
                if not -1.0 <= r <= 1.0:
                    raise BadValue(f"coefficient for {name!r} outside [-1, 1]: {r}")


def correlation_report(pool: Sequence[BuildingRecord]) -> CorrelationReport:
    return CorrelationReport(
        weather=weather_correlations(pool), static=static_correlations(pool)
    )


@dataclass(frozen=True)
class FeatureSelection:
    weather: list[str]
    static: list[str]


def _top_k(coefficients: Mapping[str, float], k: int) -> list[str]:
    if k < 0:
        raise BadValue("k must be >= 0")
    if k > len(coefficients):
        raise SelectionOverflow(
            f"asked for {k} features from {len(coefficients)} candidates"
        )
    # Signed ranking, not absolute: strongly negative features lose.
    ranked = sorted(coefficients, key=lambda n: (-coefficients[n], n))
    return ranked[:k]


def select_features(
    report: CorrelationReport, k_weather: int = 2, k_static: int = 3
) -> FeatureSelection:
    """Top-k features per group by signed coefficient, descending."""
    return FeatureSelection(
        weather=_top_k(report.weather, k_weather),
        static=_top_k(report.static, k_static),
    )
