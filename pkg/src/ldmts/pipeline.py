"""End-to-end forecasting pipeline: decompose, truncate, predict per scale,
interpolate each horizon back to full length, and sum.

Two training modes are provided. ``per_scale`` fits each level on its own
(input, target) pairs: inputs come from decomposing the history window alone,
targets from decomposing history plus future with the same scale set and
slicing the last samples of each component. ``joint`` trains all levels
simultaneously against the aggregated output (gradient backends only).
"""

from __future__ import annotations

import json
import math
import resource
import time
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .logsparse import truncate_length
from .multiscale import (
    ScaleSet,
    component_lengths,
    component_rates,
    decompose,
    interpolation_matrix,
    linear_interpolate,
    parse_eta,
)
from .predictors.linear import RidgePredictor
from .predictors.optim import adam_step, init_train_state
from .predictors.transformer import (
    DualEmbedConfig,
    DualEmbedPredictor,
    dual_embed_backward,
    dual_embed_forward,
    init_dual_embed_params,
    unfold2d,
)
from .series import (
    NormStats,
    TimeSeries,
    apply_normalizer,
    fit_normalizer,
    make_windows,
)
from .spectral import MIN_LENGTH as SPECTRAL_MIN_LENGTH
from .spectral import spectral_forecastability
from .validation import check_positive_int

BACKENDS = ("linear", "dual_embed")
LOSS_MODES = ("per_scale", "joint")
DEFAULT_LOSS_MODE = {"linear": "per_scale", "dual_embed": "joint"}


@dataclass(frozen=True)
class ScaleLevel:
    """Shape bookkeeping for one component's predictor."""

    level: int
    kind: str
    scale: int
    rate: int
    full_length: int
    kept_length: int
    horizon: int
    patch: int


@dataclass(frozen=True)
class ScalePlan:
    """Per-level lengths, horizons, and patch sizes for one (L, H) problem."""

    levels: tuple[ScaleLevel, ...]
    input_length: int
    horizon: int
    scale_set: ScaleSet

    @property
    def n_levels(self) -> int:
        return len(self.levels) - 1

    @property
    def kept_lengths(self) -> tuple[int, ...]:
        return tuple(lvl.kept_length for lvl in self.levels)

    @property
    def horizons(self) -> tuple[int, ...]:
        return tuple(lvl.horizon for lvl in self.levels)


def build_scale_plan(
    scale_set: ScaleSet,
    input_length: int,
    horizon: int,
    patch_sizes=None,
) -> ScalePlan:
    """Evaluate the length, truncation, and horizon laws for every level.

    Level 0 keeps full resolution and the full horizon H; level n has
    floor(2L / pn) samples at rate pn/2 and predicts max(1, ceil(H / rate))
    steps. Kept lengths apply the logsparse budget of the scale that produced
    each component (the last scale for the trend). The default patch size is
    that scale expressed in the component's own samples.
    """
    check_positive_int(input_length, "input_length")
    check_positive_int(horizon, "horizon")
    if input_length < scale_set.min_input_length():
        raise ValueError(
            f"input_length {input_length} below the minimum "
            f"{scale_set.min_input_length()} for scales {scale_set.scales}"
        )
    scales = scale_set.scales
    n_levels = len(scales)
    lengths = component_lengths(input_length, scales)
    rates = component_rates(scales)
    if patch_sizes is not None:
        patch_sizes = tuple(int(p) for p in patch_sizes)
        if len(patch_sizes) != n_levels + 1:
            raise ValueError(
                f"patch_sizes needs {n_levels + 1} entries, got {len(patch_sizes)}"
            )
    levels = []
    for n in range(n_levels + 1):
        budget_scale = scales[min(n, n_levels - 1)]
        kept = truncate_length(budget_scale, lengths[n], scale_set.eta)
        if kept < 2:
            raise ValueError(
                f"level {n} keeps only {kept} sample(s); increase input_length"
            )
        h_n = horizon if n == 0 else max(1, math.ceil(horizon / rates[n]))
        patch = patch_sizes[n] if patch_sizes is not None else budget_scale // rates[n]
        if not 1 <= patch <= kept:
            raise ValueError(
                f"level {n} patch {patch} outside [1, kept length {kept}]"
            )
        levels.append(
            ScaleLevel(
                level=n,
                kind="detail" if n < n_levels else "trend",
                scale=budget_scale,
                rate=rates[n],
                full_length=lengths[n],
                kept_length=kept,
                horizon=h_n,
                patch=patch,
            )
        )
    return ScalePlan(
        levels=tuple(levels),
        input_length=input_length,
        horizon=horizon,
        scale_set=scale_set,
    )


def _as_series(data) -> TimeSeries:
    if isinstance(data, TimeSeries):
        if data.rate != 1:
            raise ValueError("expected a raw series (rate 1)")
        return data
    return TimeSeries(values=data)


def oracle_component_forecasts(x, y, plan: ScalePlan) -> list[np.ndarray]:
    """True future components: decompose history plus future, slice the tails.

    Decomposing the concatenation x || y with the plan's scale set and taking
    the last H_n samples of each component gives the targets a perfect
    per-scale predictor would output.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    dxy = decompose(np.concatenate([x, y], axis=1), plan.scale_set)
    outs = []
    for n, lvl in enumerate(plan.levels):
        comp = dxy.components[n].values
        if comp.shape[1] < lvl.horizon:
            raise ValueError(
                f"level {n} component too short ({comp.shape[1]}) for horizon {lvl.horizon}"
            )
        outs.append(comp[:, -lvl.horizon :])
    return outs


def aggregate_forecasts(level_outputs, horizon: int) -> np.ndarray:
    """Interpolate every level's forecast to the full horizon and sum them."""
    total = None
    for out in level_outputs:
        up = linear_interpolate(np.atleast_2d(out), horizon)
        total = up if total is None else total + up
    if total is None:
        raise ValueError("no level outputs to aggregate")
    return total


class LdmForecaster(BaseEstimator):
    """Multiscale long-horizon forecaster with per-scale predictors.

    ``fit`` takes the raw training segment (channels, time); normalization
    stats are fit there and stored, and all internal work happens in
    normalized space. ``predict`` maps a raw (channels, input_length) history
    to a raw (channels, horizon) forecast. Channels share predictor weights:
    every (window, channel) pair is one training row.

    ``predictor_factory``, when given, is called as factory(level: ScaleLevel)
    and must return an object with fit(X, y) / predict(X); it replaces the
    built-in backends in per_scale mode (useful for testing with stub
    predictors).
    """

    def __init__(
        self,
        scales=(24, 168),
        eta=1.0,
        input_length: int = 336,
        horizon: int = 96,
        backend: str = "linear",
        loss_mode: str | None = None,
        ridge_lambda: float = 1e-3,
        layers: int = 1,
        d_model: int = 16,
        d_ff: int = 32,
        n_heads: int = 2,
        dropout: float = 0.0,
        lr: float = 1e-3,
        batch_size: int = 128,
        max_epochs: int = 50,
        patience: int = 5,
        stride: int = 1,
        seed: int = 0,
        patch_sizes=None,
        predictor_factory=None,
    ):
        self.scales = scales
        self.eta = eta
        self.input_length = input_length
        self.horizon = horizon
        self.backend = backend
        self.loss_mode = loss_mode
        self.ridge_lambda = ridge_lambda
        self.layers = layers
        self.d_model = d_model
        self.d_ff = d_ff
        self.n_heads = n_heads
        self.dropout = dropout
        self.lr = lr
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.stride = stride
        self.seed = seed
        self.patch_sizes = patch_sizes
        self.predictor_factory = predictor_factory

    # ------------------------------------------------------------------
    # configuration plumbing

    def build_plan(self) -> ScalePlan:
        scale_set = ScaleSet(tuple(int(p) for p in self.scales), parse_eta(self.eta))
        return build_scale_plan(scale_set, self.input_length, self.horizon, self.patch_sizes)

    def _resolve_loss_mode(self) -> str:
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}; choose from {BACKENDS}")
        mode = self.loss_mode or DEFAULT_LOSS_MODE[self.backend]
        if mode not in LOSS_MODES:
            raise ValueError(f"unknown loss_mode {mode!r}; choose from {LOSS_MODES}")
        if mode == "joint" and self.backend == "linear":
            raise ValueError(
                "joint loss mode needs a gradient backend; "
                "use backend='dual_embed' or loss_mode='per_scale'"
            )
        if mode == "joint" and self.predictor_factory is not None:
            raise ValueError("predictor_factory only supports per_scale mode")
        return mode

    def _level_estimator(self, lvl: ScaleLevel):
        if self.predictor_factory is not None:
            return self.predictor_factory(lvl)
        if self.backend == "linear":
            return RidgePredictor(ridge_lambda=self.ridge_lambda)
        return DualEmbedPredictor(
            patch=lvl.patch,
            d_model=self.d_model,
            d_ff=self.d_ff,
            n_heads=self.n_heads,
            layers=self.layers,
            dropout=self.dropout,
            lr=self.lr,
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            patience=self.patience,
            seed=self.seed + lvl.level,
        )

    # ------------------------------------------------------------------
    # training

    def fit(self, train, val=None):
        mode = self._resolve_loss_mode()
        plan = self.build_plan()
        train_ts = _as_series(train)
        stats = fit_normalizer(train_ts)
        xs = apply_normalizer(train_ts, stats)
        windows = make_windows(xs, self.input_length, self.horizon, self.stride)
        val_windows = None
        if val is not None:
            val_ts = _as_series(val)
            val_windows = make_windows(
                apply_normalizer(val_ts, stats),
                self.input_length,
                self.horizon,
                self.stride,
                allow_empty=True,
            ) or None

        self.norm_stats_ = stats
        self.plan_ = plan
        self.scale_set_ = plan.scale_set
        self.loss_mode_ = mode
        self.n_channels_ = train_ts.n_channels
        if mode == "per_scale":
            self._fit_per_scale(windows, val_windows)
        else:
            self._fit_joint(windows, val_windows)
        return self

    def _design(self, windows):
        """Per-level input/target rows plus the aggregated targets."""
        plan = self.plan_
        n_win = len(windows)
        n_ch = windows[0].x.shape[0]
        rows = n_win * n_ch
        xs = [np.empty((rows, lvl.kept_length)) for lvl in plan.levels]
        ys = [np.empty((rows, lvl.horizon)) for lvl in plan.levels]
        y_agg = np.empty((rows, plan.horizon))
        for w, pair in enumerate(windows):
            dx = decompose(pair.x, plan.scale_set)
            oracle = oracle_component_forecasts(pair.x, pair.y, plan)
            block = slice(w * n_ch, (w + 1) * n_ch)
            y_agg[block] = pair.y
            for n, lvl in enumerate(plan.levels):
                xs[n][block] = dx.components[n].values[:, -lvl.kept_length :]
                ys[n][block] = oracle[n]
        return xs, ys, y_agg

    def _fit_per_scale(self, windows, val_windows):
        xs, ys, _ = self._design(windows)
        val_design = self._design(val_windows) if val_windows else None
        predictors = []
        for n, lvl in enumerate(self.plan_.levels):
            est = self._level_estimator(lvl)
            if isinstance(est, DualEmbedPredictor) and val_design is not None:
                est.fit(xs[n], ys[n], validation_data=(val_design[0][n], val_design[1][n]))
            else:
                est.fit(xs[n], ys[n])
            predictors.append(est)
        self.predictors_ = predictors
        self.loss_curve_ = None
        self.val_curve_ = None

    def _fit_joint(self, windows, val_windows):
        plan = self.plan_
        xs, _, y_agg = self._design(windows)
        configs = [
            DualEmbedConfig(
                input_length=lvl.kept_length,
                horizon=lvl.horizon,
                patch=lvl.patch,
                d_model=self.d_model,
                d_ff=self.d_ff,
                n_heads=self.n_heads,
                layers=self.layers,
                dropout=self.dropout,
            )
            for lvl in plan.levels
        ]
        level_params = [
            init_dual_embed_params(cfg, np.random.default_rng(self.seed + n))
            for n, cfg in enumerate(configs)
        ]
        states = [
            init_train_state(p, lr=self.lr, batch_size=self.batch_size, seed=self.seed)
            for p in level_params
        ]
        unfolded = [unfold2d(x, cfg.patch) for x, cfg in zip(xs, configs)]
        interp = [
            interpolation_matrix(lvl.horizon, plan.horizon) for lvl in plan.levels
        ]
        if val_windows:
            val_xs, _, val_y = self._design(val_windows)
            val_unfolded = [unfold2d(x, cfg.patch) for x, cfg in zip(val_xs, configs)]

        rng = np.random.default_rng(self.seed)
        rows = y_agg.shape[0]
        best_params = None
        best_val = math.inf
        stale = 0
        loss_curve, val_curve = [], []
        for _epoch in range(self.max_epochs):
            order = rng.permutation(rows)
            total = 0.0
            for start in range(0, rows, self.batch_size):
                idx = order[start : start + self.batch_size]
                outs, caches = [], []
                for params, cfg, u in zip(level_params, configs, unfolded):
                    out, cache = dual_embed_forward(
                        params, u[idx], cfg, training=True, rng=rng, with_cache=True
                    )
                    outs.append(out)
                    caches.append(cache)
                y_hat = sum(out @ a.T for out, a in zip(outs, interp))
                resid = y_hat - y_agg[idx]
                loss = float(np.mean(resid * resid))
                if not math.isfinite(loss):
                    raise FloatingPointError(
                        f"non-finite joint loss at epoch {_epoch}; lower the learning rate"
                    )
                total += loss * idx.size
                d_hat = 2.0 * resid / resid.size
                for params, cache, a, state in zip(level_params, caches, interp, states):
                    grads = dual_embed_backward(params, cache, d_hat @ a)
                    adam_step(params, grads, state)
            loss_curve.append(total / rows)
            if not val_windows:
                continue
            val_hat = sum(
                dual_embed_forward(p, u, c) @ a.T
                for p, u, c, a in zip(level_params, val_unfolded, configs, interp)
            )
            val_mse = float(np.mean((val_hat - val_y) ** 2))
            val_curve.append(val_mse)
            if val_mse < best_val:
                best_val = val_mse
                best_params = [{k: v.copy() for k, v in p.items()} for p in level_params]
                stale = 0
            else:
                stale += 1
                if stale >= self.patience:
                    break
        if best_params is not None:
            level_params = best_params

        predictors = []
        for n, (params, cfg, lvl) in enumerate(zip(level_params, configs, plan.levels)):
            est = DualEmbedPredictor(
                patch=cfg.patch,
                d_model=cfg.d_model,
                d_ff=cfg.d_ff,
                n_heads=cfg.n_heads,
                layers=cfg.layers,
                dropout=cfg.dropout,
                lr=self.lr,
                batch_size=self.batch_size,
                max_epochs=self.max_epochs,
                patience=self.patience,
                seed=self.seed + n,
            )
            est.params_ = params
            est.config_ = cfg
            est.n_features_in_ = lvl.kept_length
            predictors.append(est)
        self.predictors_ = predictors
        self.loss_curve_ = loss_curve
        self.val_curve_ = val_curve or None

    # ------------------------------------------------------------------
    # inference

    def _check_fitted(self):
        if not hasattr(self, "predictors_"):
            raise RuntimeError("forecaster is not fitted")

    def _predict_components(self, x_norm: np.ndarray) -> list[np.ndarray]:
        d = decompose(x_norm, self.scale_set_)
        outs = []
        for n, lvl in enumerate(self.plan_.levels):
            comp = d.components[n].values[:, -lvl.kept_length :]
            out = self.predictors_[n].predict(comp)
            outs.append(np.atleast_2d(out))
        return outs

    def _forecast_normalized(self, x_norm: np.ndarray) -> np.ndarray:
        return aggregate_forecasts(self._predict_components(x_norm), self.plan_.horizon)

    def predict(self, x) -> np.ndarray:
        """Forecast (channels, horizon) raw values from a raw length-L history."""
        self._check_fitted()
        x_ts = _as_series(x)
        if x_ts.n_steps != self.input_length:
            raise ValueError(
                f"history has {x_ts.n_steps} steps, model expects {self.input_length}"
            )
        x_norm = apply_normalizer(x_ts, self.norm_stats_)
        out = self._forecast_normalized(x_norm.values)
        return out * self.norm_stats_.std[:, None] + self.norm_stats_.mean[:, None]


# ----------------------------------------------------------------------
# evaluation


@dataclass
class ComponentDiag:
    """Per-level evaluation diagnostics (normalized space, native resolution)."""

    level: int
    kind: str
    scale: int
    rate: int
    kept_length: int
    horizon: int
    forecastability: float | None
    mse: float


@dataclass
class EvalReport:
    """Aggregate and per-component metrics for one evaluation pass."""

    horizon: int
    n_windows: int
    n_channels: int
    mse: float
    mae: float
    components: list[ComponentDiag]
    config: dict
    counters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "n_windows": self.n_windows,
            "n_channels": self.n_channels,
            "mse": self.mse,
            "mae": self.mae,
            "components": [vars(c).copy() for c in self.components],
            "config": dict(self.config),
            "counters": dict(self.counters),
        }


def evaluate(model: LdmForecaster, test, stride: int = 1) -> EvalReport:
    """Dense sliding-window evaluation in normalized space.

    Metrics are computed on normalized values using the model's stored training
    stats. Per-component diagnostics report each level's native-resolution MSE
    against the true future components and the spectral forecastability of the
    test segment's components.
    """
    model._check_fitted()
    t_start = time.perf_counter()
    test_ts = _as_series(test)
    xs = apply_normalizer(test_ts, model.norm_stats_)
    plan = model.plan_
    windows = make_windows(xs, model.input_length, model.horizon, stride)

    n_levels = len(plan.levels)
    se_sum = 0.0
    ae_sum = 0.0
    count = 0
    level_se = np.zeros(n_levels)
    level_count = np.zeros(n_levels)
    for pair in windows:
        outs = model._predict_components(pair.x)
        y_hat = aggregate_forecasts(outs, plan.horizon)
        diff = y_hat - pair.y
        se_sum += float(np.sum(diff * diff))
        ae_sum += float(np.sum(np.abs(diff)))
        count += diff.size
        oracle = oracle_component_forecasts(pair.x, pair.y, plan)
        for n in range(n_levels):
            d = outs[n] - oracle[n]
            level_se[n] += float(np.sum(d * d))
            level_count[n] += d.size

    decomposed = decompose(xs.values, plan.scale_set)
    components = []
    for n, lvl in enumerate(plan.levels):
        comp = decomposed.components[n].values
        if comp.shape[1] >= SPECTRAL_MIN_LENGTH:
            score = float(np.mean([spectral_forecastability(row) for row in comp]))
        else:
            score = None
        components.append(
            ComponentDiag(
                level=lvl.level,
                kind=lvl.kind,
                scale=lvl.scale,
                rate=lvl.rate,
                kept_length=lvl.kept_length,
                horizon=lvl.horizon,
                forecastability=score,
                mse=float(level_se[n] / level_count[n]),
            )
        )

    config = {
        k: v for k, v in model.get_params().items() if k != "predictor_factory"
    }
    config["loss_mode_resolved"] = model.loss_mode_
    config["eval_stride"] = stride
    counters = {
        "wall_clock_s": time.perf_counter() - t_start,
        "peak_rss_kb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
    }
    return EvalReport(
        horizon=plan.horizon,
        n_windows=len(windows),
        n_channels=test_ts.n_channels,
        mse=se_sum / count,
        mae=ae_sum / count,
        components=components,
        config=config,
        counters=counters,
    )


# ----------------------------------------------------------------------
# model container

MODEL_FORMAT_VERSION = 1


def save_model(model: LdmForecaster, path) -> None:
    """Write a fitted forecaster to a flat .npz container with a JSON header."""
    model._check_fitted()
    if model.predictor_factory is not None:
        raise ValueError("models with a custom predictor_factory are not serializable")
    params = {k: v for k, v in model.get_params().items() if k != "predictor_factory"}
    params["scales"] = [int(p) for p in model.scales]
    if params.get("patch_sizes") is not None:
        params["patch_sizes"] = [int(p) for p in params["patch_sizes"]]
    arrays: dict[str, np.ndarray] = {
        "norm.mean": model.norm_stats_.mean,
        "norm.std": model.norm_stats_.std,
        "norm.clamped": model.norm_stats_.clamped,
    }
    level_meta = []
    for n, est in enumerate(model.predictors_):
        if isinstance(est, RidgePredictor):
            arrays[f"level{n}.coef"] = est.coef_
            arrays[f"level{n}.intercept"] = est.intercept_
            level_meta.append({"backend": "linear", "ridge_lambda": est.ridge_lambda})
        elif isinstance(est, DualEmbedPredictor):
            cfg = est.config_
            for key, value in est.params_.items():
                arrays[f"level{n}.param.{key}"] = value
            level_meta.append(
                {
                    "backend": "dual_embed",
                    "config": {
                        "input_length": cfg.input_length,
                        "horizon": cfg.horizon,
                        "patch": cfg.patch,
                        "d_model": cfg.d_model,
                        "d_ff": cfg.d_ff,
                        "n_heads": cfg.n_heads,
                        "layers": cfg.layers,
                        "dropout": cfg.dropout,
                    },
                    "param_order": list(est.params_.keys()),
                }
            )
        else:
            raise TypeError(f"cannot serialize predictor of type {type(est).__name__}")
    meta = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": "ldm-forecaster",
        "params": params,
        "loss_mode": model.loss_mode_,
        "n_channels": model.n_channels_,
        "levels": level_meta,
    }
    with open(path, "wb") as fh:
        np.savez(fh, __meta__=np.array(json.dumps(meta)), **arrays)


def load_model(path) -> LdmForecaster:
    """Inverse of :func:`save_model`."""
    with np.load(path) as npz:
        meta = json.loads(str(npz["__meta__"][()]))
        if meta.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format: {meta.get('format_version')!r}")
        params = dict(meta["params"])
        params["scales"] = tuple(params["scales"])
        if params.get("patch_sizes") is not None:
            params["patch_sizes"] = tuple(params["patch_sizes"])
        model = LdmForecaster(**params)
        model.plan_ = model.build_plan()
        model.scale_set_ = model.plan_.scale_set
        model.loss_mode_ = meta["loss_mode"]
        model.n_channels_ = int(meta["n_channels"])
        model.norm_stats_ = NormStats(
            mean=npz["norm.mean"].copy(),
            std=npz["norm.std"].copy(),
            clamped=npz["norm.clamped"].copy(),
        )
        predictors = []
        for n, level in enumerate(meta["levels"]):
            lvl = model.plan_.levels[n]
            if level["backend"] == "linear":
                est = RidgePredictor(ridge_lambda=level["ridge_lambda"])
                est.coef_ = npz[f"level{n}.coef"].copy()
                est.intercept_ = npz[f"level{n}.intercept"].copy()
                est.n_features_in_ = est.coef_.shape[1]
                est._single_output = False
            else:
                cfg = DualEmbedConfig(**level["config"])
                est = DualEmbedPredictor(
                    patch=cfg.patch,
                    d_model=cfg.d_model,
                    d_ff=cfg.d_ff,
                    n_heads=cfg.n_heads,
                    layers=cfg.layers,
                    dropout=cfg.dropout,
                )
                est.config_ = cfg
                est.params_ = {
                    key: npz[f"level{n}.param.{key}"].copy()
                    for key in level["param_order"]
                }
                est.n_features_in_ = lvl.kept_length
            predictors.append(est)
        model.predictors_ = predictors
    return model


# ----------------------------------------------------------------------
# reference baseline


def fit_single_scale_linear(
    train,
    input_length: int,
    horizon: int,
    ridge_lambda: float = 1e-3,
    stride: int = 1,
):
    """Plain ridge baseline on raw windows, same normalization convention.

    Returns (predictor, stats); the predictor maps normalized length-L rows to
    normalized length-H rows. Used for like-for-like comparisons with the
    multiscale pipeline.
    """
    train_ts = _as_series(train)
    stats = fit_normalizer(train_ts)
    xs = apply_normalizer(train_ts, stats)
    windows = make_windows(xs, input_length, horizon, stride)
    n_ch = train_ts.n_channels
    rows = len(windows) * n_ch
    X = np.empty((rows, input_length))
    Y = np.empty((rows, horizon))
    for w, pair in enumerate(windows):
        X[w * n_ch : (w + 1) * n_ch] = pair.x
        Y[w * n_ch : (w + 1) * n_ch] = pair.y
    est = RidgePredictor(ridge_lambda=ridge_lambda).fit(X, Y)
    return est, stats


def evaluate_single_scale(est, stats, test, input_length: int, horizon: int, stride: int = 1):
    """Normalized-space MSE/MAE of a plain window predictor on a test segment."""
    test_ts = _as_series(test)
    xs = apply_normalizer(test_ts, stats)
    windows = make_windows(xs, input_length, horizon, stride)
    se = ae = count = 0
    for pair in windows:
        diff = np.atleast_2d(est.predict(pair.x)) - pair.y
        se += float(np.sum(diff * diff))
        ae += float(np.sum(np.abs(diff)))
        count += diff.size
    return se / count, ae / count
