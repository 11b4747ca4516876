"""Multiscale decomposition: a cascade of centered moving-average low-pass filters,
residual high-pass details, and tail-preserving average-pool downsampling.

Given scale factors p1 < p2 < ... < pN, an input of length L is decomposed into
N detail components plus one trend component. The level-0 detail keeps full
resolution L; the level-n component has floor(2L / pn) samples, each
representing pn / 2 original time steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.ndimage import convolve1d

from .series import TimeSeries
from .validation import as_channel_matrix, check_positive_int

DETAIL = "detail"
TREND = "trend"


def parse_eta(value) -> float:
    """Accept a sparsity value as a float or a rational string like "1/16"."""
    if isinstance(value, str):
        text = value.strip()
        try:
            eta = float(Fraction(text)) if "/" in text else float(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse sparsity value {value!r}") from exc
    else:
        eta = float(value)
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"sparsity eta must be in (0, 1], got {eta!r}")
    return eta


@dataclass(frozen=True)
class ScaleSet:
    """Ordered scale factors plus the logsparse sparsity eta.

    The first scale must be even and >= 2, and each scale must be an integer
    multiple of its predecessor so every cascade step uses integer window and
    pool sizes.
    """

    scales: tuple[int, ...]
    eta: float = 1.0

    def __post_init__(self):
        scales = tuple(int(p) for p in self.scales)
        if len(scales) < 1:
            raise ValueError("at least one scale factor is required")
        if scales[0] < 2 or scales[0] % 2 != 0:
            raise ValueError(f"first scale must be even and >= 2, got {scales[0]}")
        for prev, cur in zip(scales, scales[1:]):
            if cur <= prev:
                raise ValueError(f"scales must be strictly increasing, got {scales}")
            if cur % prev != 0:
                raise ValueError(f"scale {cur} is not an integer multiple of {prev}")
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "eta", parse_eta(self.eta))

    @property
    def n_levels(self) -> int:
        return len(self.scales)

    def min_input_length(self) -> int:
        # coarsest level must retain at least 4 samples
        return 2 * self.scales[-1]


@dataclass(frozen=True)
class Component:
    """One decomposition output.

    ``scale`` is the absolute scale factor of the moving-average window that
    produced the component (for the trend, the final window). ``rate`` counts
    original time steps per sample: 1 at level 0, scale(n)/2 for n >= 1.
    """

    series: TimeSeries
    kind: str
    level: int
    rate: int
    scale: int
    full_length: int
    kept_length: int

    def __post_init__(self):
        if self.kind not in (DETAIL, TREND):
            raise ValueError(f"kind must be '{DETAIL}' or '{TREND}', got {self.kind!r}")
        if not 1 <= self.kept_length <= self.full_length:
            raise ValueError(
                f"kept_length {self.kept_length} outside [1, {self.full_length}]"
            )
        if self.series.n_steps != self.kept_length:
            raise ValueError(
                f"series length {self.series.n_steps} != kept_length {self.kept_length}"
            )
        if self.series.rate != self.rate:
            raise ValueError("series rate tag disagrees with component rate")

    @property
    def values(self) -> np.ndarray:
        return self.series.values


@dataclass(frozen=True)
class Decomposition:
    """N detail components (finest first) followed by one trend component."""

    components: tuple[Component, ...]
    source_length: int
    scale_set: ScaleSet

    def __post_init__(self):
        n = self.scale_set.n_levels
        if len(self.components) != n + 1:
            raise ValueError(f"expected {n + 1} components, got {len(self.components)}")
        kinds = [c.kind for c in self.components]
        if kinds != [DETAIL] * n + [TREND]:
            raise ValueError(f"components must be {n} details then one trend, got {kinds}")

    @property
    def n_levels(self) -> int:
        return self.scale_set.n_levels

    def level(self, n: int) -> Component:
        return self.components[n]


def moving_average(values, window: int) -> np.ndarray:
    """Centered moving average with window + 1 taps at offsets -window/2..window/2.

    Endpoint taps weigh 1/(2*window) and interior taps 1/window, so the weights
    sum to 1 exactly and a span equal to the window period is annihilated.
    Boundaries replicate the edge samples. Works on 1-D or (channels, time) input;
    output length equals input length.
    """
    window = check_positive_int(window, "window", minimum=2)
    if window % 2 != 0:
        raise ValueError(f"window must be even, got {window}")
    arr = np.asarray(values, dtype=np.float64)
    taps = np.full(window + 1, 1.0 / window)
    taps[0] = taps[-1] = 1.0 / (2.0 * window)
    return convolve1d(arr, taps, axis=-1, mode="nearest")


def avgpool_downsample(values, pool: int) -> np.ndarray:
    """Block-mean downsampling with kernel = stride = pool.

    When the length is not divisible by pool, the remainder is trimmed from the
    FRONT so the most recent samples are preserved.
    """
    pool = check_positive_int(pool, "pool")
    arr = np.asarray(values, dtype=np.float64)
    n = arr.shape[-1]
    out_len = n // pool
    if out_len == 0:
        raise ValueError(f"length {n} is shorter than pool size {pool}")
    trimmed = arr[..., n - out_len * pool :]
    return trimmed.reshape(arr.shape[:-1] + (out_len, pool)).mean(axis=-1)


@dataclass(frozen=True)
class CascadeStep:
    """Diagnostic record of one cascade level before downsampling."""

    level: int
    rate: int
    window: int
    approximation: np.ndarray
    smoothed: np.ndarray
    detail: np.ndarray


def cascade_steps(values, scale_set: ScaleSet) -> list[CascadeStep]:
    """Run the filter cascade, recording approximation/smoothed/detail per level.

    At each level the detail is the exact residual approximation - smoothed, so
    approximation == smoothed + detail holds elementwise by construction.
    """
    arr = as_channel_matrix(values, "values")
    if arr.shape[-1] < scale_set.min_input_length():
        raise ValueError(
            f"input length {arr.shape[-1]} too short for scales {scale_set.scales}; "
            f"need at least {scale_set.min_input_length()}"
        )
    steps = []
    approx = arr
    rate = 1
    for i, scale in enumerate(scale_set.scales):
        window = scale // rate
        smoothed = moving_average(approx, window)
        steps.append(
            CascadeStep(
                level=i,
                rate=rate,
                window=window,
                approximation=approx,
                smoothed=smoothed,
                detail=approx - smoothed,
            )
        )
        approx = avgpool_downsample(smoothed, (scale // 2) // rate)
        rate = scale // 2
    steps.append(
        CascadeStep(
            level=len(scale_set.scales),
            rate=rate,
            window=0,
            approximation=approx,
            smoothed=approx,
            detail=np.zeros_like(approx),
        )
    )
    return steps


def reconstruct_level(smoothed, detail) -> np.ndarray:
    """Inverse of one cascade split before downsampling: smoothed + detail."""
    smoothed = np.asarray(smoothed, dtype=np.float64)
    detail = np.asarray(detail, dtype=np.float64)
    if smoothed.shape != detail.shape:
        raise ValueError(f"shape mismatch: {smoothed.shape} vs {detail.shape}")
    return smoothed + detail


def decompose(series, scale_set: ScaleSet) -> Decomposition:
    """Decompose a series into N details plus one trend along the cascade.

    Channels are processed independently with a shared code path. Components
    are emitted untruncated (kept_length == full_length); logsparse truncation
    is a separate step.
    """
    if isinstance(series, TimeSeries):
        if series.rate != 1:
            raise ValueError("decompose expects a raw series (rate 1)")
        src = series
    else:
        src = TimeSeries(values=series)
    steps = cascade_steps(src.values, scale_set)
    components = []
    for step in steps[:-1]:
        components.append(
            _component(src, step.detail, DETAIL, step.level, step.rate, scale_set.scales[step.level])
        )
    trend = steps[-1]
    components.append(
        _component(src, trend.approximation, TREND, trend.level, trend.rate, scale_set.scales[-1])
    )
    return Decomposition(
        components=tuple(components),
        source_length=src.n_steps,
        scale_set=scale_set,
    )


def _component(src: TimeSeries, values, kind, level, rate, scale) -> Component:
    length = values.shape[-1]
    label = f"{src.name}[{kind}{level}]" if src.name else f"{kind}{level}"
    return Component(
        series=TimeSeries(values=values, rate=rate, name=label, channel_names=src.channel_names),
        kind=kind,
        level=level,
        rate=rate,
        scale=scale,
        full_length=length,
        kept_length=length,
    )


def component_lengths(input_length: int, scales: tuple[int, ...]) -> list[int]:
    """Component lengths for an input of ``input_length``: L, then floor(2L/pn)."""
    lengths = [int(input_length)]
    current = int(input_length)
    rate = 1
    for scale in scales:
        current //= (scale // 2) // rate
        rate = scale // 2
        lengths.append(current)
    return lengths


def component_rates(scales: tuple[int, ...]) -> list[int]:
    """Sampling rates per level: 1 at level 0, pn/2 for n >= 1."""
    return [1] + [scale // 2 for scale in scales]


def linear_interpolate(values, length: int) -> np.ndarray:
    """Endpoint-aligned linear resampling of the last axis to ``length`` samples.

    Output j samples the piecewise-linear curve through the inputs at position
    j * (a - 1) / (b - 1). A single input point extends as a constant, and
    length == input length returns the input unchanged.
    """
    arr = np.asarray(values, dtype=np.float64)
    n = arr.shape[-1]
    if n < 1:
        raise ValueError("cannot interpolate an empty sequence")
    length = check_positive_int(length, "length")
    if length == n:
        return arr.copy()
    if n == 1:
        return np.repeat(arr, length, axis=-1)
    weights, lo, hi = _interp_taps(n, length)
    return arr[..., lo] * (1.0 - weights) + arr[..., hi] * weights


def interpolation_matrix(n: int, length: int) -> np.ndarray:
    """Dense (length, n) matrix A with linear_interpolate(x, length) == x @ A.T."""
    n = check_positive_int(n, "n")
    length = check_positive_int(length, "length")
    matrix = np.zeros((length, n))
    if n == 1:
        matrix[:, 0] = 1.0
        return matrix
    if length == n:
        np.fill_diagonal(matrix, 1.0)
        return matrix
    weights, lo, hi = _interp_taps(n, length)
    rows = np.arange(length)
    np.add.at(matrix, (rows, lo), 1.0 - weights)
    np.add.at(matrix, (rows, hi), weights)
    return matrix


def _interp_taps(n: int, length: int):
    positions = np.linspace(0.0, n - 1.0, length)
    lo = np.clip(np.floor(positions).astype(np.intp), 0, n - 2)
    weights = positions - lo
    return weights, lo, lo + 1
