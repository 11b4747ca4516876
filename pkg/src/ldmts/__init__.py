"""ldmts: multiscale decomposition and long-horizon time-series forecasting.

A forecasting window is split by a cascade of centered moving-average filters
into detail components plus a trend, each downsampled to its own rate. Long
tails are cut by a scale-aware budget, one predictor runs per component, and
the per-scale forecasts are interpolated back to the target horizon and
summed.
"""

__version__ = "0.1.0"

from .logsparse import TruncationPlan, truncate_decomposition, truncate_length, truncate_tail
from .multiscale import (
    Component,
    Decomposition,
    ScaleSet,
    component_lengths,
    component_rates,
    decompose,
    interpolation_matrix,
    linear_interpolate,
    moving_average,
    parse_eta,
)
from .pipeline import (
    EvalReport,
    LdmForecaster,
    ScaleLevel,
    ScalePlan,
    aggregate_forecasts,
    build_scale_plan,
    evaluate,
    load_model,
    oracle_component_forecasts,
    save_model,
)
from .predictors import (
    DualEmbedConfig,
    DualEmbedPredictor,
    RidgePredictor,
    gradcheck,
    gradcheck_dual_embed,
    unfold2d,
)
from .series import (
    NormStats,
    SplitSpec,
    TimeSeries,
    apply_normalizer,
    chronological_split,
    fit_normalizer,
    invert_normalizer,
    make_windows,
    mae,
    mse,
)
from .spectral import ConstantInputWarning, dominant_period, spectral_forecastability

__all__ = [
    "Component",
    "ConstantInputWarning",
    "Decomposition",
    "DualEmbedConfig",
    "DualEmbedPredictor",
    "EvalReport",
    "LdmForecaster",
    "NormStats",
    "RidgePredictor",
    "ScaleLevel",
    "ScalePlan",
    "ScaleSet",
    "SplitSpec",
    "TimeSeries",
    "TruncationPlan",
    "aggregate_forecasts",
    "apply_normalizer",
    "build_scale_plan",
    "chronological_split",
    "component_lengths",
    "component_rates",
    "decompose",
    "dominant_period",
    "evaluate",
    "fit_normalizer",
    "gradcheck",
    "gradcheck_dual_embed",
    "interpolation_matrix",
    "invert_normalizer",
    "linear_interpolate",
    "load_model",
    "mae",
    "make_windows",
    "moving_average",
    "mse",
    "oracle_component_forecasts",
    "parse_eta",
    "save_model",
    "spectral_forecastability",
    "truncate_decomposition",
    "truncate_length",
    "truncate_tail",
    "unfold2d",
]
