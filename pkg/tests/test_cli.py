"""Command-line interface, exercised through click's test runner."""

import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from conftest import two_period_signal, write_csv
from ldmts.cli import main
from ldmts.report import load_report, strip_counters

CONFIG = """
scale_set = 4, 24
input_size = 48
horizon = 8
stride = 4
backend = linear
ridge_lambda = 1e-6
seed = 3
"""


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def bench_setup(tmp_path):
    """A small forecastable dataset plus a config file."""
    t = np.arange(1200, dtype=float)
    values = np.sin(2 * np.pi * t / 24)[None, :] + 0.01 * np.cos(2 * np.pi * t / 4)
    data = write_csv(tmp_path / "toy.csv", values, channel_names=("OT",))
    config = tmp_path / "run.cfg"
    config.write_text(CONFIG)
    return data, config, tmp_path


def test_help_and_version(runner):
    assert runner.invoke(main, ["--help"]).exit_code == 0
    for sub in ("decompose", "train", "forecast", "evaluate", "bench"):
        result = runner.invoke(main, [sub, "--help"])
        assert result.exit_code == 0, result.output
    version = runner.invoke(main, ["--version"])
    assert "0.1.0" in version.output


def test_decompose_exports_components(runner, tmp_path):
    data = write_csv(tmp_path / "sig.csv", two_period_signal(3360)[None, :],
                     channel_names=("OT",))
    out = tmp_path / "out"
    result = runner.invoke(
        main, ["decompose", "--data", str(data), "--out", str(out),
               "--scales", "24,168", "--eta", "1/16"],
    )
    assert result.exit_code == 0, result.output
    files = {p.name for p in out.iterdir()}
    assert files == {
        "level0_detail.csv", "level1_detail.csv", "level2_trend.csv",
        "components.json",
    }
    lengths = {
        "level0_detail.csv": 3360,
        "level1_detail.csv": 280,
        "level2_trend.csv": 40,
    }
    for name, rows in lengths.items():
        frame = pd.read_csv(out / name)
        assert len(frame) == rows
        assert list(frame.columns) == ["original_time_index", "OT"]
        assert frame["original_time_index"].iloc[-1] == 3359

    sidecar = json.loads((out / "components.json").read_text())
    assert sidecar["scales"] == [24, 168]
    assert sidecar["eta"] == 1 / 16
    assert sidecar["source_length"] == 3360
    comps = sidecar["components"]
    assert [c["level"] for c in comps] == [0, 1, 2]
    assert [c["kept_length"] for c in comps] == [384, 280, 40]
    # the two periodic parts land in the right components
    assert abs(comps[0]["dominant_period"][0] - 24) <= 1
    assert abs(comps[1]["dominant_period"][0] - 168) <= 14
    assert all(0.0 <= s <= 1.0 for c in comps for s in c["forecastability"])


@pytest.mark.filterwarnings("ignore::Warning")
def test_decompose_constant_series_gives_flat_details(runner, tmp_path):
    data = write_csv(tmp_path / "flat.csv", np.full((1, 400), 3.0))
    out = tmp_path / "out"
    result = runner.invoke(
        main, ["decompose", "--data", str(data), "--out", str(out),
               "--scales", "4,24"],
    )
    assert result.exit_code == 0, result.output
    detail = pd.read_csv(out / "level0_detail.csv")["ch0"].to_numpy()
    np.testing.assert_allclose(detail, 0.0, atol=1e-12)
    trend = pd.read_csv(out / "level2_trend.csv")["ch0"].to_numpy()
    np.testing.assert_allclose(trend, 3.0, atol=1e-12)


def test_decompose_rejects_bad_scales(runner, tmp_path):
    data = write_csv(tmp_path / "sig.csv", np.random.default_rng(0).normal(size=(1, 600)))
    result = runner.invoke(
        main, ["decompose", "--data", str(data), "--out", str(tmp_path / "o"),
               "--scales", "24,169"],
    )
    assert result.exit_code == 1
    assert "multiple" in result.output


def test_train_then_forecast_then_evaluate(runner, bench_setup):
    data, config, tmp_path = bench_setup
    run_dir = tmp_path / "run"
    result = runner.invoke(
        main, ["train", "--config", str(config), "--data", str(data),
               "--out", str(run_dir)],
    )
    assert result.exit_code == 0, result.output
    assert (run_dir / "model.npz").is_file()
    manifest = load_report(run_dir / "manifest.json")
    assert manifest["seed"] == 3
    assert manifest["command"] == "train"
    assert manifest["dataset"]["rows"] == 1200
    assert "fit_s" in manifest["timings"]

    fc_dir = tmp_path / "fc"
    result = runner.invoke(
        main, ["forecast", "--model", str(run_dir / "model.npz"),
               "--data", str(data), "--out", str(fc_dir)],
    )
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(fc_dir / "forecast.csv")
    assert list(frame.columns) == ["step", "OT"]
    assert len(frame) == 8
    assert frame["step"].tolist() == list(range(1, 9))
    assert np.isfinite(frame["OT"]).all()
    # tracks the clean continuation up to the coarse levels' upsampling error
    t_future = np.arange(1200, 1208, dtype=float)
    truth = np.sin(2 * np.pi * t_future / 24) + 0.01 * np.cos(2 * np.pi * t_future / 4)
    assert np.max(np.abs(frame["OT"].to_numpy() - truth)) < 0.5

    ev_dir = tmp_path / "ev"
    result = runner.invoke(
        main, ["evaluate", "--model", str(run_dir / "model.npz"),
               "--data", str(data), "--out", str(ev_dir), "--stride", "16"],
    )
    assert result.exit_code == 0, result.output
    report = load_report(ev_dir / "report.json")
    assert report["schema_version"] == 1
    assert report["horizon"] == 8
    assert report["mse"] < 0.05
    assert "mse" in result.output


def test_bench_writes_all_artifacts(runner, bench_setup):
    data, config, tmp_path = bench_setup
    out = tmp_path / "bench"
    result = runner.invoke(
        main, ["bench", "--config", str(config), "--data", str(data),
               "--out", str(out), "--predictions"],
    )
    assert result.exit_code == 0, result.output
    for name in ("model.npz", "report.json", "manifest.json", "predictions.csv"):
        assert (out / name).is_file(), name
    report = load_report(out / "report.json")
    assert report["config"]["backend"] == "linear"
    assert report["n_channels"] == 1
    preds = pd.read_csv(out / "predictions.csv")
    assert list(preds.columns) == ["t0", "channel", "step", "y_true", "y_pred"]
    assert preds["step"].max() == 8
    assert len(preds) == report["n_windows"] * 8


def test_bench_is_deterministic_between_runs(runner, bench_setup):
    data, config, tmp_path = bench_setup
    reports = []
    for tag in ("a", "b"):
        out = tmp_path / f"bench_{tag}"
        result = runner.invoke(
            main, ["bench", "--config", str(config), "--data", str(data),
                   "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        reports.append(strip_counters(load_report(out / "report.json")))
    assert reports[0] == reports[1]


def test_seed_override_lands_in_manifest(runner, bench_setup):
    data, config, tmp_path = bench_setup
    out = tmp_path / "seeded"
    result = runner.invoke(
        main, ["train", "--config", str(config), "--data", str(data),
               "--out", str(out), "--seed", "11"],
    )
    assert result.exit_code == 0, result.output
    assert load_report(out / "manifest.json")["seed"] == 11


def test_bad_eta_config_fails_cleanly(runner, bench_setup):
    data, _, tmp_path = bench_setup
    config = tmp_path / "bad.cfg"
    config.write_text(CONFIG + "eta = 0\n")
    result = runner.invoke(
        main, ["train", "--config", str(config), "--data", str(data),
               "--out", str(tmp_path / "x")],
    )
    assert result.exit_code == 1
    assert "(0, 1]" in result.output


def test_univariate_selection_flows_through(runner, tmp_path):
    t = np.arange(1200, dtype=float)
    values = np.vstack([np.cos(2 * np.pi * t / 24), np.sin(2 * np.pi * t / 24)])
    data = write_csv(tmp_path / "two.csv", values, channel_names=("aux", "OT"))
    config = tmp_path / "run.cfg"
    config.write_text(CONFIG)
    out = tmp_path / "uni"
    result = runner.invoke(
        main, ["bench", "--config", str(config), "--data", str(data),
               "--out", str(out), "--univariate", "OT"],
    )
    assert result.exit_code == 0, result.output
    assert load_report(out / "report.json")["n_channels"] == 1
