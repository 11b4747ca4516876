"""Command-line harness: dataset ingestion, experiments, exports, reports."""

from __future__ import annotations

import json
import time
from pathlib import Path

import click
import numpy as np
import pandas as pd

from . import __version__
from .config import RunConfig, config_sha256, load_config
from .logsparse import truncate_length
from .multiscale import ScaleSet, decompose, parse_eta
from .pipeline import LdmForecaster, evaluate, load_model, save_model
from .report import RunManifest, emit_report
from .series import SplitSpec, apply_normalizer, chronological_split, make_windows
from .spectral import MIN_LENGTH as SPECTRAL_MIN_LENGTH
from .spectral import dominant_period, spectral_forecastability
from .data import ingest_csv


def export_decomposition(series, scale_set: ScaleSet, out_dir) -> list[Path]:
    """Write one CSV per component plus a components.json summary sidecar.

    Each CSV has an original_time_index column (the raw step each sample's
    block ends at) and one value column per channel. The sidecar records
    lengths, rates, logsparse budgets, dominant periods, and forecastability
    scores per component.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    decomposition = decompose(series, scale_set)
    t_source = decomposition.source_length
    names = series.channel_names if hasattr(series, "channel_names") else None
    written = []
    summary = []
    for comp in decomposition.components:
        length = comp.kept_length
        idx = t_source - 1 - comp.rate * np.arange(length - 1, -1, -1, dtype=np.intp)
        cols = {"original_time_index": idx}
        channel_names = names or tuple(
            f"ch{i}" for i in range(comp.values.shape[0])
        )
        for i, ch in enumerate(channel_names):
            cols[str(ch)] = comp.values[i]
        path = out_dir / f"level{comp.level}_{comp.kind}.csv"
        pd.DataFrame(cols).to_csv(path, index=False)
        written.append(path)

        if length >= SPECTRAL_MIN_LENGTH:
            periods = [float(dominant_period(row, comp.rate)) for row in comp.values]
            scores = [float(spectral_forecastability(row)) for row in comp.values]
        else:
            periods, scores = None, None
        summary.append(
            {
                "level": comp.level,
                "kind": comp.kind,
                "rate": comp.rate,
                "scale": comp.scale,
                "length": length,
                "kept_length": truncate_length(comp.scale, length, scale_set.eta),
                "dominant_period": periods,
                "forecastability": scores,
            }
        )
    sidecar = out_dir / "components.json"
    sidecar.write_text(
        json.dumps(
            {"source_length": t_source, "scales": list(scale_set.scales),
             "eta": scale_set.eta, "components": summary},
            indent=2,
        )
        + "\n"
    )
    written.append(sidecar)
    return written


def _fail_on_value_error(fn):
    """Turn ValueErrors from config/data validation into clean CLI errors."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, FileNotFoundError) as exc:
            raise click.ClickException(str(exc)) from exc

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group(context_settings={"auto_envvar_prefix": "LDMTS"})
@click.version_option(version=__version__, prog_name="ldmts")
@click.option("--threads", type=click.IntRange(min=1), default=None,
              help="Cap the numeric library thread pools.")
@click.pass_context
def main(ctx, threads):
    """Multiscale decomposition and long-horizon forecasting tools."""
    if threads is not None:
        from threadpoolctl import threadpool_limits

        ctx.obj = threadpool_limits(limits=threads)


@main.command("decompose")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--scales", help='Comma-separated scale factors, e.g. "24,168".')
@click.option("--eta", help='Logsparse sparsity in (0, 1], e.g. "1/16".')
@click.option("--univariate", metavar="COLUMN", help="Use a single target column.")
@_fail_on_value_error
def decompose_cmd(data, out, config_path, scales, eta, univariate):
    """Export a series' components as CSVs plus a spectral summary."""
    cfg = load_config(config_path) if config_path else RunConfig()
    scale_tuple = (
        tuple(int(p) for p in scales.strip().strip("{}").split(",")) if scales else cfg.scale_set
    )
    eta_value = parse_eta(eta) if eta is not None else cfg.eta
    series = ingest_csv(data, target_column=univariate)
    written = export_decomposition(series, ScaleSet(scale_tuple, eta_value), out)
    click.echo(f"wrote {len(written) - 1} components + sidecar to {out}")


def _load_run_inputs(config_path, data, seed, univariate):
    cfg = load_config(config_path)
    if seed is not None:
        cfg.seed = seed
    series = ingest_csv(data, target_column=univariate)
    return cfg, series


def _split_for(cfg: RunConfig, series):
    window = cfg.input_length() + cfg.horizon
    return chronological_split(series, SplitSpec(), min_window=window)


def _manifest(cfg, config_path, data, command, timings) -> RunManifest:
    from .data import dataset_fingerprint

    return RunManifest(
        config_sha256=config_sha256(config_path),
        dataset=dataset_fingerprint(data),
        seed=cfg.seed,
        tool_version=__version__,
        command=command,
        resolved_params=cfg.forecaster_params(),
        timings=timings,
    )


@main.command("train")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--univariate", metavar="COLUMN")
@_fail_on_value_error
def train_cmd(config_path, data, out, seed, univariate):
    """Split, normalize, and train a forecaster; write model.npz + manifest."""
    cfg, series = _load_run_inputs(config_path, data, seed, univariate)
    train, val, _test = _split_for(cfg, series)
    t0 = time.perf_counter()
    model = LdmForecaster(**cfg.forecaster_params()).fit(train, val)
    fit_s = time.perf_counter() - t0
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_model(model, out_dir / "model.npz")
    manifest = _manifest(cfg, config_path, data, "train", {"fit_s": fit_s})
    emit_report(manifest, out_dir / "manifest.json")
    click.echo(f"trained {cfg.backend} model ({fit_s:.1f}s) -> {out_dir / 'model.npz'}")


@main.command("forecast")
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--univariate", metavar="COLUMN")
@_fail_on_value_error
def forecast_cmd(model_path, data, out, univariate):
    """Forecast from the last input window of a series; write forecast.csv."""
    model = load_model(model_path)
    series = ingest_csv(data, target_column=univariate)
    if series.n_steps < model.input_length:
        raise click.ClickException(
            f"series has {series.n_steps} steps, model needs {model.input_length}"
        )
    history = series.slice_time(series.n_steps - model.input_length, series.n_steps)
    y_hat = model.predict(history)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = series.channel_names or tuple(f"ch{i}" for i in range(series.n_channels))
    frame = pd.DataFrame({"step": np.arange(1, model.horizon + 1)})
    for i, ch in enumerate(names):
        frame[str(ch)] = y_hat[i]
    frame.to_csv(out_dir / "forecast.csv", index=False)
    click.echo(f"wrote {model.horizon}-step forecast to {out_dir / 'forecast.csv'}")


@main.command("evaluate")
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Segment to evaluate on (dense stride-1 windows).")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--stride", type=click.IntRange(min=1), default=1)
@click.option("--univariate", metavar="COLUMN")
@_fail_on_value_error
def evaluate_cmd(model_path, data, out, stride, univariate):
    """Evaluate a saved model on a series segment; write report.json."""
    model = load_model(model_path)
    series = ingest_csv(data, target_column=univariate)
    report = evaluate(model, series, stride=stride)
    out_dir = Path(out)
    payload = emit_report(report, out_dir / "report.json")
    click.echo(
        f"mse {payload['mse']:.6g}  mae {payload['mae']:.6g}  "
        f"({payload['n_windows']} windows) -> {out_dir / 'report.json'}"
    )


@main.command("bench")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--univariate", metavar="COLUMN")
@click.option("--predictions", is_flag=True, default=False,
              help="Also write per-window predictions.csv.")
@_fail_on_value_error
def bench_cmd(config_path, data, out, seed, univariate, predictions):
    """Full protocol: split 70/10/20, train on train+val, report test metrics."""
    cfg, series = _load_run_inputs(config_path, data, seed, univariate)
    train, val, test = _split_for(cfg, series)
    t0 = time.perf_counter()
    model = LdmForecaster(**cfg.forecaster_params()).fit(train, val)
    fit_s = time.perf_counter() - t0
    t1 = time.perf_counter()
    report = evaluate(model, test, stride=cfg.stride)
    eval_s = time.perf_counter() - t1

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_model(model, out_dir / "model.npz")
    payload = emit_report(report, out_dir / "report.json")
    manifest = _manifest(
        cfg, config_path, data, "bench", {"fit_s": fit_s, "eval_s": eval_s}
    )
    emit_report(manifest, out_dir / "manifest.json")
    if predictions:
        _write_predictions(model, test, out_dir / "predictions.csv", cfg.stride)
    click.echo(
        f"mse {payload['mse']:.6g}  mae {payload['mae']:.6g}  "
        f"({payload['n_windows']} test windows) -> {out_dir}"
    )


def _write_predictions(model: LdmForecaster, test, path, stride: int) -> None:
    """Long-format normalized predictions: window anchor, channel, step, true, pred."""
    xs = apply_normalizer(test, model.norm_stats_)
    windows = make_windows(xs, model.input_length, model.horizon, stride)
    names = test.channel_names or tuple(f"ch{i}" for i in range(test.n_channels))
    records = []
    for pair in windows:
        y_hat = model._forecast_normalized(pair.x)
        for i, ch in enumerate(names):
            for h in range(model.horizon):
                records.append(
                    (pair.t0, str(ch), h + 1, pair.y[i, h], y_hat[i, h])
                )
    frame = pd.DataFrame.from_records(
        records, columns=["t0", "channel", "step", "y_true", "y_pred"]
    )
    frame.to_csv(path, index=False)


if __name__ == "__main__":
    main()
