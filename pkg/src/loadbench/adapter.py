"""Readers for externally published building-load datasets.

Full-scale releases come in several shapes: long CSVs with one row per
(timestamp, building), wide CSVs with one column per building, or the
same in parquet. Column names drift between releases, so resolution goes
through an alias map instead of exact matches. Nothing here hard-codes
row counts; summaries are computed from whatever the files contain.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import BadValue, SchemaMismatch

DATA_ENV_VAR = "LOADBENCH_IL_DATA"

COLUMN_ALIASES = {
    "timestamp": ("timestamp", "time", "datetime", "date_time", "ts", "date"),
    "building_id": ("building_id", "bldg_id", "building", "customer_id", "id",
                    "meter_id", "site_id"),
    "load_kwh": ("load_kwh", "load", "kwh", "energy_kwh", "electricity_kwh",
                 "consumption", "energy", "value",
                 "out.electricity.total.energy_consumption"),
    "building_type": ("building_type", "type", "in.comstock_building_type",
                      "comstock_building_type", "category"),
    "floor_space_ft2": ("floor_space_ft2", "floor_space", "floor_area_ft2",
                        "in.sqft", "sqft", "floor_area"),
    "wall_area_m2": ("wall_area_m2", "wall_area", "external_wall_area",
                     "external_wall_area_m2"),
    "window_area_m2": ("window_area_m2", "window_area", "external_window_area",
                       "external_window_area_m2"),
}


def _canon(name: str) -> str:
    return str(name).strip().lower().replace(" ", "_").replace("-", "_")


def resolve_columns(columns, required) -> dict:
    """Map canonical names to actual column labels, or raise SchemaMismatch."""
    by_canon = {_canon(col): col for col in columns}
    out = {}
    missing = []
    for name in required:
        found = None
        for alias in COLUMN_ALIASES.get(name, (name,)):
            if _canon(alias) in by_canon:
                found = by_canon[_canon(alias)]
                break
        if found is None:
            missing.append(name)
        else:
            out[name] = found
    if missing:
        raise SchemaMismatch(
            f"could not resolve columns {missing} among {list(columns)[:12]}"
        )
    return out


def read_table(path) -> pd.DataFrame:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".parquet", ".pq"):
        return pd.read_parquet(path)
    if suffix in (".csv", ".gz", ".txt"):
        return pd.read_csv(path)
    raise BadValue(f"unsupported table format: {path}")


def extract_loads(frame: pd.DataFrame) -> dict[str, np.ndarray]:
    """Per-building load arrays from either a long or a wide table.

    Long layout is detected by the presence of a building-id column; wide
    tables treat every numeric non-time column as one building.
    """
    try:
        cols = resolve_columns(frame.columns, ("building_id", "load_kwh"))
        long_layout = True
    except SchemaMismatch:
        long_layout = False
    if long_layout:
        out = {}
        for bid, group in frame.groupby(cols["building_id"], sort=True):
            out[str(bid)] = group[cols["load_kwh"]].to_numpy(dtype=np.float64)
        return out
    time_cols = set()
    try:
        time_cols.add(resolve_columns(frame.columns, ("timestamp",))["timestamp"])
    except SchemaMismatch:
        pass
    out = {}
    for col in frame.columns:
        if col in time_cols:
            continue
        values = pd.to_numeric(frame[col], errors="coerce")
        if values.notna().all():
            out[str(col)] = values.to_numpy(dtype=np.float64)
    if not out:
        raise SchemaMismatch("no numeric building columns found in wide table")
    return out


def extract_weather(frame: pd.DataFrame, feature_aliases: dict) -> dict[str, np.ndarray]:
    """Named weather arrays from a table, one per resolvable feature."""
    out = {}
    by_canon = {_canon(col): col for col in frame.columns}
    for name, aliases in feature_aliases.items():
        for alias in aliases:
            col = by_canon.get(_canon(alias))
            if col is not None:
                out[name] = pd.to_numeric(
                    frame[col], errors="coerce"
                ).to_numpy(dtype=np.float64)
                break
    return out


def summarize_loads(loads: dict[str, np.ndarray]) -> dict:
    if not loads:
        raise BadValue("no buildings to summarize")
    stacked = np.concatenate([np.asarray(v, dtype=np.float64) for v in loads.values()])
    return {
        "n_buildings": len(loads),
        "n_observations": int(stacked.size),
        "load_mean": float(stacked.mean()),
        "load_std": float(stacked.std()),
    }


def find_dataset_files(root, token: str) -> list[Path]:
    """Data files under root whose names contain token (case-insensitive)."""
    root = Path(root)
    token = token.lower()
    hits = []
    for path in sorted(root.rglob("*")):
        if not path.is_file():
            continue
        if path.suffix.lower() not in (".csv", ".parquet", ".pq", ".gz"):
            continue
        if token in path.name.lower() or token in str(path.parent).lower():
            hits.append(path)
    return hits


def data_root() -> str | None:
    return os.environ.get(DATA_ENV_VAR) or None
