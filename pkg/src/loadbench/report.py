"""Result tables, forecast-file IO, and prediction plots.

Metric rows are plain dicts with the columns
``dataset,arch,L,T,nmse,nmae,seed,lr``. The report flags the best value
per (dataset, L, T) group and metric as ``best`` and the runner-up as
``second``; ties share the flag. All output is deterministically ordered
so identical inputs produce identical bytes.
"""

from __future__ import annotations

import csv
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import AlignmentError, BadValue, EmptyEvaluation

METRIC_COLUMNS = ("dataset", "arch", "L", "T", "nmse", "nmae", "seed", "lr")
FORECAST_COLUMNS = ("window_index", "step", "prediction")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def write_metric_rows(path, rows: Iterable[dict]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRIC_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in METRIC_COLUMNS])


def read_metric_rows(paths) -> list[dict]:
    if isinstance(paths, (str, bytes)) or hasattr(paths, "read"):
        paths = [paths]
    rows = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = set(METRIC_COLUMNS) - set(reader.fieldnames or ())
            if missing:
                raise BadValue(f"{path} missing columns {sorted(missing)}")
            for rec in reader:
                rows.append({
                    "dataset": rec["dataset"],
                    "arch": rec["arch"],
                    "L": int(rec["L"]),
                    "T": int(rec["T"]),
                    "nmse": float(rec["nmse"]),
                    "nmae": float(rec["nmae"]),
                    "seed": rec["seed"],
                    "lr": rec["lr"],
                })
    return rows


def flag_rows(rows: Sequence[dict]) -> list[dict]:
    """Annotate each row with nmse_flag/nmae_flag in {'best','second',''}.

    Flags are assigned within each (dataset, L, T) group: every row equal
    to the minimum is 'best'; every row equal to the smallest strictly
    larger value is 'second'.
    """
    if not rows:
        raise EmptyEvaluation("no metric rows to flag")
    out = [dict(row) for row in rows]
    groups: dict[tuple, list[dict]] = {}
    for row in out:
        groups.setdefault((row["dataset"], row["L"], row["T"]), []).append(row)
    for group in groups.values():
        for metric in ("nmse", "nmae"):
            values = sorted({row[metric] for row in group})
            best = values[0]
            second = values[1] if len(values) > 1 else math.nan
            for row in group:
                flag = ""
                if row[metric] == best:
                    flag = "best"
                elif row[metric] == second:
                    flag = "second"
                row[f"{metric}_flag"] = flag
    return sorted(out, key=lambda r: (r["dataset"], r["L"], r["T"], r["arch"]))


def write_flagged_csv(path, rows: Sequence[dict]):
    flagged = flag_rows(rows)
    columns = ("dataset", "arch", "L", "T", "nmse", "nmse_flag",
               "nmae", "nmae_flag", "seed", "lr")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in flagged:
            writer.writerow([_fmt(row.get(col)) for col in columns])


def _cell(value: float, flag: str) -> str:
    text = f"{value:.4f}"
    if flag == "best":
        return f"**{text}**"
    if flag == "second":
        return f"*{text}*"
    return text


def render_markdown(rows: Sequence[dict]) -> str:
    """One table per dataset, Table-1 style: a column pair per architecture,
    a row per (L, T); best values bold, runners-up italic."""
    flagged = flag_rows(rows)
    datasets = sorted({r["dataset"] for r in flagged})
    lines = []
    for dataset in datasets:
        subset = [r for r in flagged if r["dataset"] == dataset]
        archs = sorted({r["arch"] for r in subset})
        pairs = sorted({(r["L"], r["T"]) for r in subset})
        lines.append(f"## {dataset}")
        lines.append("")
        header = ["(L, T)"]
        for arch in archs:
            header += [f"{arch} NMSE", f"{arch} NMAE"]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        index = {(r["L"], r["T"], r["arch"]): r for r in subset}
        for L, T in pairs:
            cells = [f"({L}, {T})"]
            for arch in archs:
                row = index.get((L, T, arch))
                if row is None:
                    cells += ["-", "-"]
                else:
                    cells += [
                        _cell(row["nmse"], row["nmse_flag"]),
                        _cell(row["nmae"], row["nmae_flag"]),
                    ]
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")
    return "\n".join(lines)


def write_report(csv_path, md_path, rows: Sequence[dict]):
    write_flagged_csv(csv_path, rows)
    with open(md_path, "w") as fh:
        fh.write(render_markdown(rows))


# --------------------------------------------------------------------------
# forecast files
# --------------------------------------------------------------------------

def write_forecast_csv(path, predictions: np.ndarray):
    """Serialize an (n_windows, T) forecast matrix.

    Rows follow window enumeration order (building-major, time-minor) with
    one row per (window_index, step); predictions print via repr so the
    round trip is exact.
    """
    preds = np.asarray(predictions, dtype=np.float64)
    if preds.ndim != 2:
        raise BadValue(f"predictions must be 2-D, got shape {preds.shape}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FORECAST_COLUMNS)
        for w in range(preds.shape[0]):
            for t in range(preds.shape[1]):
                writer.writerow([w, t, repr(float(preds[w, t]))])


def read_forecast_csv(path, n_windows: int, horizon: int) -> np.ndarray:
    """Parse a forecast file and check it tiles (n_windows, horizon) exactly."""
    preds = np.full((n_windows, horizon), np.nan)
    count = 0
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(FORECAST_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise AlignmentError(f"{path} missing columns {sorted(missing)}")
        for rec in reader:
            try:
                w = int(rec["window_index"])
                t = int(rec["step"])
                v = float(rec["prediction"])
            except (TypeError, ValueError) as exc:
                raise AlignmentError(f"{path}: bad row {rec}") from exc
            if not 0 <= w < n_windows:
                raise AlignmentError(
                    f"window_index {w} outside [0, {n_windows}) - the file does "
                    f"not align with this dataset's {n_windows} windows"
                )
            if not 0 <= t < horizon:
                raise AlignmentError(f"step {t} outside [0, {horizon})")
            if not math.isnan(preds[w, t]):
                raise AlignmentError(f"duplicate entry for window {w} step {t}")
            preds[w, t] = v
            count += 1
    if count != n_windows * horizon:
        raise AlignmentError(
            f"{count} rows cover only part of {n_windows} x {horizon} forecasts"
        )
    return preds


# --------------------------------------------------------------------------
# prediction plots
# --------------------------------------------------------------------------

def plot_horizon_predictions(
    path, truth: np.ndarray, predictions: np.ndarray, title: str,
    ylabel: str = "load [kWh]",
):
    """Line plot of T-step-ahead predictions against ground truth."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    truth = np.asarray(truth)
    predictions = np.asarray(predictions)
    if truth.shape != predictions.shape or truth.ndim != 1:
        raise BadValue("truth and predictions must be equal-length 1-D arrays")
    fig, ax = plt.subplots(figsize=(10, 4))
    steps = np.arange(len(truth))
    ax.plot(steps, truth, label="ground truth", linewidth=1.2)
    ax.plot(steps, predictions, label="prediction", linewidth=1.2)
    ax.set_xlabel("test step")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
