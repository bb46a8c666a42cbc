"""Acceptance criteria, one test per criterion.

Each test prints a single pass/fail line (visible with pytest -s) and
enforces its runtime budget where one is defined. Criterion 2 needs the
published full-scale datasets on disk; point LOADBENCH_IL_DATA at their
root to enable it, otherwise it reports as skipped.
"""

import contextlib
import csv
import json
import math
import os
import time

import numpy as np
import pytest
import torch
import yaml

from conftest import TOY_HP, make_batch, make_record
from loadbench import cli
from loadbench.curation import (
    CurationSpec,
    apportion,
    curate,
    heterogeneity_report,
    pearson,
    static_correlations,
    weather_correlations,
)
from loadbench.data import (
    SplitSpec,
    StaticFeatures,
    WindowSet,
    WindowSpec,
    apply_normalizer,
    fit_normalizer,
    split,
    window_count,
    windows,
)
from loadbench.metrics import MetricConfig, nmae, nmse
from loadbench.models import ARCHITECTURES, build, default_hyperparameters
from loadbench.models.attention import FullAttention, ProbAttention
from loadbench.models.autoformer import SeriesDecomposition
from loadbench.models.base import batch_to_tensors
from loadbench.models.patchtst import PatchTST
from loadbench.models.timesnet import detect_periods
from loadbench.synth import SynthSpec, generate
from loadbench.training import simulate_early_stopping
from loadbench import reference


@contextlib.contextmanager
def criterion(num: int, label: str, budget: float | None = None):
    t0 = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"[criterion {num:02d}] {label}: FAIL")
        raise
    dt = time.monotonic() - t0
    on_time = budget is None or dt <= budget
    verdict = "PASS" if on_time else "FAIL"
    print(f"[criterion {num:02d}] {label}: {verdict} ({dt:.2f}s)")
    assert on_time, f"runtime {dt:.2f}s exceeded the {budget}s budget"


# -------------------------------------------------------------------------
# 1. metric oracle equivalence
# -------------------------------------------------------------------------

def test_01_metric_oracle_equivalence():
    with criterion(1, "metric oracle equivalence", budget=1.0):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            shape = (int(rng.integers(1, 20)), int(rng.integers(1, 12)))
            p = rng.normal(size=shape)
            t = rng.normal(size=shape)
            sigma = float(rng.uniform(0.1, 5.0))
            cfg = MetricConfig(sigma_y=sigma)
            ref_mse = float(((p - t) ** 2).sum() / p.size / sigma**2)
            ref_mae = float(np.abs(p - t).sum() / p.size / sigma)
            assert nmse(p, t, cfg) == pytest.approx(ref_mse, rel=1e-12)
            assert nmae(p, t, cfg) == pytest.approx(ref_mae, rel=1e-12)
        cfg = MetricConfig(sigma_y=2.0)
        p = np.array([1.0, 2.0, 3.0])
        t = np.zeros(3)
        assert nmse(p, t, cfg) == (1.0 + 4.0 + 9.0) / 3.0 / 4.0  # 1.16667
        assert nmae(p, t, cfg) == (1.0 + 2.0 + 3.0) / 3.0 / 2.0  # 1.0


# -------------------------------------------------------------------------
# 2. data integrity against the published full-scale datasets
# -------------------------------------------------------------------------

def test_02_data_integrity():
    root = os.environ.get("LOADBENCH_IL_DATA")
    if not root:
        print("[criterion 02] data integrity: SKIP "
              "(set LOADBENCH_IL_DATA to the downloaded dataset root)")
        pytest.skip("full-scale datasets not available offline")
    from loadbench import adapter
    with criterion(2, "data integrity"):
        expected = {
            "hom": (reference.LOAD_STATS["IL-HOM"], "IL-HOM"),
            "het": (reference.LOAD_STATS["IL-HET"], "IL-HET"),
        }
        for token, ((mean_ref, std_ref), name) in (
            (k, (v[0], v[1])) for k, v in expected.items()
        ):
            files = adapter.find_dataset_files(root, token)
            assert files, f"no {name} data files found under {root}"
            loads: dict[str, np.ndarray] = {}
            for path in files:
                try:
                    part = adapter.extract_loads(adapter.read_table(path))
                except Exception:
                    continue
                for bid, series in part.items():
                    loads[bid] = (np.concatenate([loads[bid], series])
                                  if bid in loads else series)
            summary = adapter.summarize_loads(loads)
            assert summary["n_observations"] == reference.OBSERVATIONS_PER_DATASET
            assert abs(summary["load_mean"] - mean_ref) <= 1e-3
            assert abs(summary["load_std"] - std_ref) <= 1e-3


# -------------------------------------------------------------------------
# 3. correlation recovery on planted couplings
# -------------------------------------------------------------------------

def test_03_correlation_recovery():
    with criterion(3, "correlation recovery", budget=10.0):
        rng = np.random.default_rng(7)
        planted = 0.8
        n = 8000
        recs = []
        for i in range(6):
            temp = rng.normal(size=n)
            wind = rng.normal(size=n)
            signal = planted * temp + math.sqrt(1 - planted**2) * rng.normal(size=n)
            load = 10.0 + signal + rng.normal(0, 0.1, n)  # noise std 10% of signal
            recs.append(make_record(f"W{i}", load, temp=temp, wind=wind))
        out = weather_correlations(recs)
        exp = planted / math.sqrt(1.01)  # attenuated by the 10% noise
        assert abs(out["dry_bulb_temp_c"] - exp) <= 0.05
        assert abs(out["wind_speed_ms"]) <= 0.05  # uncoupled feature

        planted_s = 0.9
        floors = rng.uniform(1000, 9000, size=60)
        zf = (floors - floors.mean()) / floors.std()
        levels = planted_s * zf + math.sqrt(1 - planted_s**2) * rng.normal(size=60)
        levels = 20 + 2 * levels
        srecs = []
        for i in range(60):
            series = levels[i] + rng.normal(0, 0.2 * 2, 500)  # 10% of level std
            srecs.append(make_record(
                f"S{i:02d}", series,
                static=StaticFeatures("Warehouse", floors[i], 100.0 + i, 10.0 + i),
            ))
        out_s = static_correlations(srecs)
        assert abs(out_s["floor_space_ft2"] - planted_s) <= 0.05

        for _ in range(1000):
            a = rng.normal(size=50)
            b = rng.normal(size=50) + 0.5 * a
            za = (a - a.mean()) / a.std()
            zb = (b - b.mean()) / b.std()
            brute = float(np.mean(za * zb))
            assert pearson(a, b) == pytest.approx(brute, abs=1e-12)


# -------------------------------------------------------------------------
# 4. curation properties
# -------------------------------------------------------------------------

def test_04_curation_properties():
    with criterion(4, "curation properties", budget=10.0):
        rng = np.random.default_rng(1)
        for _ in range(200):
            k = int(rng.integers(1, 6))
            counts = {f"T{j}": int(rng.integers(0, 30)) for j in range(k)}
            pool_total = sum(counts.values())
            if pool_total == 0:
                continue
            total = int(rng.integers(0, pool_total + 1))
            alloc = apportion(counts, total)
            assert sum(alloc.values()) == total
            for name, c in counts.items():
                assert 0 <= alloc[name] <= c
                assert abs(alloc[name] - total * c / pool_total) < 1.0

        stds = []
        for n_types in (1, 2, 4, 8):
            pool = generate(SynthSpec(
                n_buildings=8, n_steps=800, n_types=n_types, seed=5
            ))
            ds = curate(pool, CurationSpec(target_count=8, mode="heterogeneous"))
            stds.append(heterogeneity_report(ds).pooled_std)
        assert all(b > a for a, b in zip(stds, stds[1:])), stds

        pool = generate(SynthSpec(n_buildings=12, n_steps=700, n_types=3, seed=2))
        spec = CurationSpec(target_count=5, mode="heterogeneous", random_seed=9)
        assert curate(pool, spec).building_ids == curate(pool, spec).building_ids


# -------------------------------------------------------------------------
# 5. split and window arithmetic
# -------------------------------------------------------------------------

def test_05_split_window_arithmetic():
    with criterion(5, "split/window arithmetic", budget=1.0):
        rec = make_record("B1", np.zeros(35060))
        tr, va, te = split(rec, SplitSpec())
        assert (tr.n_steps, va.n_steps, te.n_steps) == (28048, 3506, 3506)

        rng = np.random.default_rng(3)
        for _ in range(100):
            L = int(rng.integers(1, 64))
            T = int(rng.integers(1, 32))
            n = int(rng.integers(L + T, L + T + 200))
            spec = WindowSpec(lookback=L, lookahead=T)
            assert window_count(n, spec) == n - L - T + 1

        # leakage check: window contents never cross split boundaries
        rec = make_record("B1", np.arange(400, dtype=float))
        tr, va, te = split(rec, SplitSpec())
        spec = WindowSpec(lookback=16, lookahead=4)
        for sample in windows(tr, spec):
            assert sample.y_target.max() < va.load.values.min()
        for sample in windows(te, spec):
            assert sample.y_hist.min() >= te.load.values.min()


# -------------------------------------------------------------------------
# 6. finite-difference gradient checks
# -------------------------------------------------------------------------

def _fd_gradient_check(arch: str, n_samples: int = 100, h: float = 1e-5,
                       tol: float = 1e-3):
    window = WindowSpec(lookback=16, lookahead=4)
    model = build(arch, window, TOY_HP[arch], seed=0).double()
    model.eval()  # dropout off; stochastic cores pin their eval seed
    y, x, u, s, target = batch_to_tensors(make_batch(2, 16, 4, seed=1),
                                          dtype=torch.float64)

    def loss_fn():
        return ((model(y, x, u, s).squeeze(-1) - target) ** 2).mean()

    model.zero_grad()
    loss_fn().backward()
    params = [p for p in model.parameters() if p.grad is not None]
    sizes = np.array([p.numel() for p in params])
    cum = np.cumsum(sizes)
    assert cum[-1] >= n_samples, f"{arch}: only {cum[-1]} parameters"
    rng = np.random.default_rng(hash(arch) % 2**32)
    flats = rng.choice(cum[-1], size=n_samples, replace=False)
    worst = 0.0
    for flat in flats:
        ti = int(np.searchsorted(cum, flat, side="right"))
        li = int(flat - (cum[ti - 1] if ti else 0))
        p = params[ti]
        g_auto = float(p.grad.view(-1)[li])
        with torch.no_grad():
            orig = float(p.view(-1)[li])
            p.view(-1)[li] = orig + h
            up = float(loss_fn())
            p.view(-1)[li] = orig - h
            down = float(loss_fn())
            p.view(-1)[li] = orig
        g_fd = (up - down) / (2 * h)
        # denominator floor sits above central-difference roundoff (~1e-11)
        # so zero-gradient parameters compare on |diff| rather than noise
        rel = abs(g_fd - g_auto) / max(abs(g_fd), abs(g_auto), 1e-6)
        worst = max(worst, rel)
        assert rel <= tol, (
            f"{arch}: grad mismatch at tensor {ti} index {li}: "
            f"autograd {g_auto:.3e} vs fd {g_fd:.3e} (rel {rel:.2e})"
        )
    return worst


def test_06_gradient_checks():
    with criterion(6, "finite-difference gradients", budget=300.0):
        for arch in ARCHITECTURES:
            worst = _fd_gradient_check(arch)
            print(f"    {arch}: worst relative error {worst:.2e}")


# -------------------------------------------------------------------------
# 7. overfit sanity at full-size defaults, shrunk window
# -------------------------------------------------------------------------

OVERFIT_LR = {
    "lstm": 1e-2,
    "lstnet": 1e-2,
    "transformer": 1e-3,
    "autoformer": 1e-3,
    "informer": 1e-3,
    "timesnet": 1e-3,
    "patchtst": 1e-3,
}


def test_07_overfit_sanity():
    with criterion(7, "overfit sanity", budget=600.0):
        window = WindowSpec(lookback=64, lookahead=4)
        pool = generate(SynthSpec(n_buildings=1, n_steps=400, n_types=1, seed=6))
        stats = fit_normalizer(pool)
        ws = WindowSet([apply_normalizer(pool[0], stats)], window)
        batch = ws.gather(np.arange(32))  # the fixed 32-window subset
        sigma2 = stats.sigma_y_normalized**2
        for arch in ARCHITECTURES:
            torch.manual_seed(0)
            model = build(arch, window, default_hyperparameters(arch), seed=0)
            y, x, u, s, target = batch_to_tensors(batch)
            opt = torch.optim.Adam(model.parameters(), lr=OVERFIT_LR[arch])
            model.train()
            final = math.inf
            for step in range(500):
                opt.zero_grad()
                loss = ((model(y, x, u, s).squeeze(-1) - target) ** 2).mean() / sigma2
                loss.backward()
                opt.step()
                final = float(loss.detach())
                if final < 0.05:
                    break
            print(f"    {arch}: train NMSE {final:.4f} after {step + 1} steps")
            assert final < 0.05, f"{arch} stuck at {final:.4f}"


# -------------------------------------------------------------------------
# 8. mechanism oracles
# -------------------------------------------------------------------------

def test_08_mechanism_oracles():
    with criterion(8, "mechanism oracles"):
        torch.manual_seed(0)
        q = torch.randn(2, 2, 32, 8)
        k = torch.randn(2, 2, 32, 8)
        v = torch.randn(2, 2, 32, 8)
        full = FullAttention(mask_flag=False, dropout=0.0)(q, k, v)
        sparse = ProbAttention(factor=100, dropout=0.0).eval()(q, k, v)
        assert (full - sparse).abs().max() <= 1e-6

        x = torch.randn(3, 48, 5, dtype=torch.float64)
        seasonal, trend = SeriesDecomposition(25)(x)
        assert (seasonal + trend - x).abs().max() <= 1e-9

        L = 256
        rng = np.random.default_rng(4)
        hits = 0
        for _ in range(20):
            p = int(rng.integers(4, 33))
            t = np.arange(L)
            sig = np.sin(2 * np.pi * t / p) + rng.normal(0, 0.05, L)
            periods, _ = detect_periods(
                torch.tensor(sig, dtype=torch.float32).view(1, L, 1), k=5
            )
            expected = L // int(round(L / p))
            hits += expected in periods[0].tolist()
        assert hits == 20, f"period recovery {hits}/20"

        for L, pl, st in ((512, 16, 8), (96, 16, 8), (50, 7, 3), (16, 16, 16)):
            hp = dict(TOY_HP["patchtst"], patch_len=pl, stride=st)
            model = PatchTST(WindowSpec(lookback=L, lookahead=4), hp)
            assert model.n_patches == (L + st - pl) // st + 1


# -------------------------------------------------------------------------
# 9. early stopping
# -------------------------------------------------------------------------

def test_09_early_stopping():
    with criterion(9, "early stopping"):
        assert simulate_early_stopping(
            [5, 4, 3, 3, 3, 3, 3], patience=5
        ) == (7, 3, True)
        decreasing = [10.0 - 0.25 * i for i in range(20)]
        termination, best, stopped = simulate_early_stopping(decreasing, patience=5)
        assert (termination, best, stopped) == (20, 20, False)


# -------------------------------------------------------------------------
# 10. end-to-end reproducibility and report flagging
# -------------------------------------------------------------------------

def _pipeline(root) -> bytes:
    """synth -> curate -> train -> evaluate -> report; returns metrics bytes."""
    root.mkdir(parents=True, exist_ok=True)
    assert cli.main(["synth", "--out-dir", str(root / "pool"), "--buildings",
                     "6", "--steps", "700", "--types", "3", "--seed", "12"]) == 0
    assert cli.main(["curate", "--timeseries", str(root / "pool/timeseries.csv"),
                     "--static", str(root / "pool/static.csv"), "--count", "4",
                     "--mode", "heterogeneous", "--curation-seed", "1",
                     "--out-dir", str(root / "cur")]) == 0
    cfg = {
        "seed": 0,
        "dataset": {
            "name": "e2e",
            "timeseries": str(root / "cur/timeseries.csv"),
            "static": str(root / "cur/static.csv"),
        },
        "window": {"lookback": 32, "lookahead": 4},
        "model": {"arch": "lstm", "hyperparameters": {"hidden_size": 8}},
        "train": {"max_epochs": 2, "batch_size": 128, "learning_rate": 1e-3},
        "output": {"dir": str(root / "run")},
    }
    cfg_path = root / "exp.yaml"
    cfg_path.write_text(yaml.safe_dump(cfg))
    assert cli.main(["train", "--config", str(cfg_path)]) == 0
    assert cli.main(["evaluate", "--config", str(cfg_path), "--checkpoint",
                     str(root / "run/checkpoint.pt"),
                     "--out", str(root / "metrics.csv")]) == 0
    assert cli.main(["report", "--metrics", str(root / "metrics.csv"),
                     "--out-dir", str(root / "rep")]) == 0
    return (root / "metrics.csv").read_bytes()


def test_10_end_to_end_reproducibility(tmp_path):
    with criterion(10, "end-to-end reproducibility"):
        a = _pipeline(tmp_path / "a")
        b = _pipeline(tmp_path / "b")
        assert a == b, "two seeded runs differ"

        # report flags on the published full-scale numbers: the foundation
        # model fine-tune leads every group; the runner-up is timesnet
        # except IL-HET T=96 where patchtst edges it out
        from loadbench.report import flag_rows
        flagged = flag_rows(reference.full_scale_rows())
        for row in flagged:
            for metric in ("nmse", "nmae"):
                want = ""
                if row["arch"] == "timesfm_ft":
                    want = "best"
                elif (row["dataset"], row["T"]) == ("IL-HET", 96):
                    want = "second" if row["arch"] == "patchtst" else ""
                elif row["arch"] == "timesnet":
                    want = "second"
                got = row[f"{metric}_flag"]
                assert got == want, (
                    f"{row['dataset']} T={row['T']} {row['arch']} {metric}: "
                    f"flag {got!r}, published assignment {want!r}"
                )


# -------------------------------------------------------------------------
# 11. external-forecast round trip
# -------------------------------------------------------------------------

def test_11_external_round_trip(tmp_path):
    with criterion(11, "external-forecast round trip"):
        root = tmp_path / "rt"
        _pipeline(root)
        cfg_path = root / "exp.yaml"
        metrics = root / "rt_metrics.csv"
        assert cli.main(["evaluate", "--config", str(cfg_path), "--checkpoint",
                         str(root / "run/checkpoint.pt"), "--out", str(metrics),
                         "--export-forecast", str(root / "fc.csv")]) == 0
        assert cli.main(["eval-external", "--config", str(cfg_path),
                         "--forecast", str(root / "fc.csv"),
                         "--arch-label", "roundtrip",
                         "--out", str(metrics)]) == 0
        rows = {r["arch"]: r for r in csv.DictReader(open(metrics))}
        for metric in ("nmse", "nmae"):
            internal = float(rows["lstm"][metric])
            external = float(rows["roundtrip"][metric])
            assert abs(internal - external) <= 1e-9, (
                f"{metric}: {internal!r} vs {external!r}"
            )
