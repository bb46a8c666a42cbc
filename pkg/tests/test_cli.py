"""End-to-end checks of the command-line surface.

Commands run in-process through cli.main so coverage tools and debuggers
see them; every invocation asserts on the exit code.
"""

import csv
import json

import pytest
import yaml

from loadbench import cli
from loadbench.errors import ConfigError


def run(argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def pool_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("pool")
    assert run(["synth", "--out-dir", out, "--buildings", "6", "--steps", "700",
                "--types", "3", "--seed", "5"]) == 0
    return out


@pytest.fixture(scope="module")
def trained(pool_dir, tmp_path_factory):
    root = tmp_path_factory.mktemp("run")
    cfg = {
        "seed": 0,
        "dataset": {
            "name": "cli-test",
            "timeseries": str(pool_dir / "timeseries.csv"),
            "static": str(pool_dir / "static.csv"),
        },
        "window": {"lookback": 32, "lookahead": 4},
        "model": {"arch": "lstm", "hyperparameters": {"hidden_size": 8}},
        "train": {"max_epochs": 2, "batch_size": 128, "learning_rate": 1e-3},
        "output": {"dir": str(root / "run")},
    }
    cfg_path = root / "exp.yaml"
    cfg_path.write_text(yaml.safe_dump(cfg))
    assert run(["train", "--config", cfg_path]) == 0
    return cfg_path, root / "run"


def test_synth_writes_dataset(pool_dir):
    assert (pool_dir / "timeseries.csv").exists()
    assert (pool_dir / "static.csv").exists()
    manifest = json.loads((pool_dir / "manifest.json").read_text())
    assert len(manifest["building_ids"]) == 6


def test_curate_cli(pool_dir, tmp_path):
    out = tmp_path / "cur"
    assert run(["curate", "--timeseries", pool_dir / "timeseries.csv",
                "--static", pool_dir / "static.csv", "--count", "4",
                "--mode", "heterogeneous", "--out-dir", out]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["building_ids"]) == 4
    assert "forecast_row_order" in manifest
    rows = list(csv.DictReader(open(out / "heterogeneity.csv")))
    assert rows[-1]["building_type"] == "__pooled__"


def test_correlate_cli(pool_dir, tmp_path):
    out = tmp_path / "corr.csv"
    assert run(["correlate", "--timeseries", pool_dir / "timeseries.csv",
                "--static", pool_dir / "static.csv", "--out", out]) == 0
    rows = list(csv.DictReader(open(out)))
    groups = {r["group"] for r in rows}
    assert groups == {"weather", "static"}
    for r in rows:
        assert -1.0 <= float(r["r"]) <= 1.0


def test_train_outputs(trained):
    _, run_dir = trained
    assert (run_dir / "checkpoint.pt").exists()
    lines = (run_dir / "trainlog.jsonl").read_text().splitlines()
    assert "summary" in json.loads(lines[-1])
    assert not (run_dir / ".loadbench.lock").exists()  # lock released


def test_evaluate_and_report(trained, tmp_path):
    cfg_path, run_dir = trained
    metrics = tmp_path / "metrics.csv"
    assert run(["evaluate", "--config", cfg_path, "--checkpoint",
                run_dir / "checkpoint.pt", "--out", metrics]) == 0
    rows = list(csv.DictReader(open(metrics)))
    assert len(rows) == 1
    assert rows[0]["dataset"] == "cli-test"
    assert rows[0]["arch"] == "lstm"
    # a second evaluate replaces the row instead of appending a duplicate
    assert run(["evaluate", "--config", cfg_path, "--checkpoint",
                run_dir / "checkpoint.pt", "--out", metrics]) == 0
    assert len(list(csv.DictReader(open(metrics)))) == 1

    rep_dir = tmp_path / "rep"
    assert run(["report", "--metrics", metrics, "--out-dir", rep_dir]) == 0
    assert "**" in (rep_dir / "report.md").read_text()


def test_export_and_eval_external(trained, tmp_path):
    cfg_path, run_dir = trained
    metrics = tmp_path / "metrics.csv"
    forecast = tmp_path / "fc.csv"
    assert run(["evaluate", "--config", cfg_path, "--checkpoint",
                run_dir / "checkpoint.pt", "--out", metrics,
                "--export-forecast", forecast]) == 0
    assert run(["eval-external", "--config", cfg_path, "--forecast", forecast,
                "--arch-label", "ext", "--out", metrics]) == 0
    rows = {r["arch"]: r for r in csv.DictReader(open(metrics))}
    assert abs(float(rows["lstm"]["nmse"]) - float(rows["ext"]["nmse"])) < 1e-9


def test_plot_cli(trained, tmp_path):
    cfg_path, run_dir = trained
    out = tmp_path / "plot.png"
    assert run(["plot-predictions", "--config", cfg_path, "--checkpoint",
                run_dir / "checkpoint.pt", "--building-index", "1",
                "--first-k", "20", "--out", out]) == 0
    assert out.stat().st_size > 1000


def test_plot_rejects_bad_index(trained, tmp_path, capsys):
    cfg_path, run_dir = trained
    code = run(["plot-predictions", "--config", cfg_path, "--checkpoint",
                run_dir / "checkpoint.pt", "--building-index", "66",
                "--first-k", "20", "--out", tmp_path / "x.png"])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "BadIndex"


def test_lock_blocks_second_writer(trained, capsys):
    cfg_path, run_dir = trained
    (run_dir / ".loadbench.lock").write_text("held")
    try:
        code = run(["train", "--config", cfg_path])
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err["error"] == "RunLocked"
    finally:
        (run_dir / ".loadbench.lock").unlink()


def test_config_unknown_field(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("train:\n  batch_sizes: 4\n")
    assert run(["train", "--config", bad]) == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "ConfigError"
    assert "train.batch_sizes" in err["message"]


def test_config_type_error():
    with pytest.raises(ConfigError, match="window.lookback"):
        cli._check_fields({"window": {"lookback": "long"}}, cli._SCHEMA)


def test_missing_static_file(pool_dir, tmp_path, capsys):
    code = run(["correlate", "--timeseries", pool_dir / "timeseries.csv",
                "--static", tmp_path / "nope.csv", "--out", tmp_path / "c.csv"])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "MissingStaticFeatures"


def test_truncated_forecast_rejected(trained, tmp_path, capsys):
    cfg_path, run_dir = trained
    forecast = tmp_path / "fc.csv"
    assert run(["evaluate", "--config", cfg_path, "--checkpoint",
                run_dir / "checkpoint.pt", "--out", tmp_path / "m.csv",
                "--export-forecast", forecast]) == 0
    lines = forecast.read_text().splitlines()
    (tmp_path / "short.csv").write_text("\n".join(lines[:10]) + "\n")
    code = run(["eval-external", "--config", cfg_path,
                "--forecast", tmp_path / "short.csv",
                "--out", tmp_path / "m.csv"])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "AlignmentError"
