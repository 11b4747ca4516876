"""Core series containers, normalization, chronological splits, and sliding windows.

All containers are immutable after construction (backing arrays are marked
read-only), so values can be shared freely across worker threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .validation import as_channel_matrix, check_positive_int


class ZeroVarianceWarning(UserWarning):
    """A channel had zero variance; its std was clamped to 1."""


@dataclass(frozen=True)
class TimeSeries:
    """A multichannel series: ``values`` is (channels, time), row-major in time.

    ``rate`` is the number of original time steps represented by one sample
    (1 for raw data, larger for downsampled components).
    """

    values: np.ndarray
    rate: int = 1
    name: str = ""
    channel_names: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = as_channel_matrix(self.values, "values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        check_positive_int(self.rate, "rate")
        if self.channel_names is not None:
            names = tuple(str(c) for c in self.channel_names)
            if len(names) != arr.shape[0]:
                raise ValueError(
                    f"channel_names has {len(names)} entries for {arr.shape[0]} channels"
                )
            object.__setattr__(self, "channel_names", names)

    @property
    def n_channels(self) -> int:
        return self.values.shape[0]

    @property
    def n_steps(self) -> int:
        return self.values.shape[1]

    def slice_time(self, start: int, stop: int) -> "TimeSeries":
        if not 0 <= start < stop <= self.n_steps:
            raise ValueError(f"invalid time slice [{start}, {stop}) for T={self.n_steps}")
        return replace(self, values=self.values[:, start:stop])

    def with_values(self, values) -> "TimeSeries":
        return replace(self, values=values)


def _values_of(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return as_channel_matrix(series, "series")


@dataclass(frozen=True)
class NormStats:
    """Per-channel training mean/std. ``clamped`` flags zero-variance channels."""

    mean: np.ndarray
    std: np.ndarray
    clamped: np.ndarray

    def __post_init__(self):
        for name in ("mean", "std", "clamped"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.mean.shape == self.std.shape == self.clamped.shape):
            raise ValueError("mean/std/clamped must have matching shapes")
        if np.any(self.std <= 0):
            raise ValueError("std must be strictly positive")


def fit_normalizer(train) -> NormStats:
    """Per-channel mean and population std (divisor T) of the training data.

    Zero-variance channels get std clamped to 1 and are flagged in
    ``NormStats.clamped`` (a ``ZeroVarianceWarning`` is emitted).
    """
    values = _values_of(train)
    mean = values.mean(axis=1)
    std = values.std(axis=1)  # population form
    clamped = std == 0.0
    if clamped.any():
        warnings.warn(
            f"{int(clamped.sum())} zero-variance channel(s); std clamped to 1",
            ZeroVarianceWarning,
            stacklevel=2,
        )
        std = np.where(clamped, 1.0, std)
    return NormStats(mean=mean, std=std, clamped=clamped)


def _check_channels(values: np.ndarray, stats: NormStats) -> None:
    if values.shape[0] != stats.mean.shape[0]:
        raise ValueError(
            f"channel mismatch: series has {values.shape[0]}, stats have {stats.mean.shape[0]}"
        )


def apply_normalizer(series, stats: NormStats):
    """z = (x - mean) / std per channel. Returns the same container type as the input."""
    values = _values_of(series)
    _check_channels(values, stats)
    out = (values - stats.mean[:, None]) / stats.std[:, None]
    if isinstance(series, TimeSeries):
        return series.with_values(out)
    return out


def invert_normalizer(series, stats: NormStats):
    """Exact inverse of :func:`apply_normalizer`."""
    values = _values_of(series)
    _check_channels(values, stats)
    out = values * stats.std[:, None] + stats.mean[:, None]
    if isinstance(series, TimeSeries):
        return series.with_values(out)
    return out


@dataclass(frozen=True)
class SplitSpec:
    """Chronological split fractions; they must sum to 1 within 1e-9."""

    train_frac: float = 0.7
    val_frac: float = 0.1
    test_frac: float = 0.2

    def __post_init__(self):
        fracs = (self.train_frac, self.val_frac, self.test_frac)
        if any(f < 0 for f in fracs):
            raise ValueError(f"split fractions must be non-negative, got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1, got {sum(fracs)!r}")


def chronological_split(
    series: TimeSeries,
    spec: SplitSpec | None = None,
    min_window: int | None = None,
) -> tuple[TimeSeries, TimeSeries, TimeSeries]:
    """Split into contiguous train/val/test segments in time order.

    Train and val take floor(T * frac) steps; the remainder goes to test, so
    the three segments concatenate back to the original series exactly.
    When ``min_window`` is given (an L + H window size), every segment must be
    able to host at least one window.
    """
    spec = spec or SplitSpec()
    T = series.n_steps
    n_train = int(T * spec.train_frac)
    n_val = int(T * spec.val_frac)
    n_test = T - n_train - n_val
    if min(n_train, n_val, n_test) < 1:
        raise ValueError(f"split of T={T} produces an empty segment ({n_train}/{n_val}/{n_test})")
    if min_window is not None:
        for label, n in (("train", n_train), ("val", n_val), ("test", n_test)):
            if n < min_window:
                raise ValueError(
                    f"{label} segment has {n} steps, too short for one window of {min_window}"
                )
    train = series.slice_time(0, n_train)
    val = series.slice_time(n_train, n_train + n_val)
    test = series.slice_time(n_train + n_val, T)
    return train, val, test


@dataclass(frozen=True)
class WindowPair:
    """Adjacent history/future slices: x is (M, L), y is (M, H), anchored at t0."""

    x: np.ndarray
    y: np.ndarray
    t0: int


def window_anchors(T: int, history: int, horizon: int, stride: int = 1) -> np.ndarray:
    """Anchor indices t with t + history + horizon <= T, stepping by stride."""
    check_positive_int(history, "history")
    check_positive_int(horizon, "horizon")
    check_positive_int(stride, "stride")
    last = T - history - horizon
    if last < 0:
        return np.empty(0, dtype=np.intp)
    return np.arange(0, last + 1, stride, dtype=np.intp)


def make_windows(
    series,
    history: int,
    horizon: int,
    stride: int = 1,
    allow_empty: bool = False,
) -> list[WindowPair]:
    """Sliding (x, y) pairs: x = s[t, t+L), y = s[t+L, t+L+H) for t = 0, stride, ...

    The slices are read-only views into the source, so the window list is cheap
    even for long series. An empty result raises unless ``allow_empty`` is set
    (evaluation of short segments may legitimately yield no windows).
    """
    values = _values_of(series)
    anchors = window_anchors(values.shape[1], history, horizon, stride)
    if anchors.size == 0 and not allow_empty:
        raise ValueError(
            f"series of length {values.shape[1]} cannot host an "
            f"({history}, {horizon}) window"
        )
    return [
        WindowPair(x=values[:, t : t + history], y=values[:, t + history : t + history + horizon], t0=int(t))
        for t in anchors
    ]


def mse(y, y_hat) -> float:
    """Mean squared error over all entries."""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape:
        raise ValueError(f"shape mismatch: {y.shape} vs {y_hat.shape}")
    return float(np.mean((y - y_hat) ** 2))


def mae(y, y_hat) -> float:
    """Mean absolute error over all entries."""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape:
        raise ValueError(f"shape mismatch: {y.shape} vs {y_hat.shape}")
    return float(np.mean(np.abs(y - y_hat)))
