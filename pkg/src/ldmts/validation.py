"""Shared input-validation helpers."""

from __future__ import annotations

import numpy as np


def as_channel_matrix(values, name: str = "values") -> np.ndarray:
    """Coerce input to a finite 2-D float64 array of shape (channels, time).

    1-D input is promoted to a single channel.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} is empty (shape {arr.shape})")
    check_finite(arr, name)
    return arr


def as_float_vector(values, name: str = "values") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got ndim={arr.ndim}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    return arr


def as_sample_matrix(values, name: str = "X") -> np.ndarray:
    """Coerce estimator input to a finite 2-D float64 array (samples, features)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (samples, features), got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} is empty (shape {arr.shape})")
    check_finite(arr, name)
    return arr


def check_finite(arr: np.ndarray, name: str = "values") -> None:
    if not np.isfinite(arr).all():
        bad = np.argwhere(~np.isfinite(np.atleast_2d(arr)))[0]
        raise ValueError(
            f"{name} contains a non-finite entry (first at {tuple(int(i) for i in bad)})"
        )


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value
