"""Shared fixtures and synthetic-signal helpers."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest


def two_period_signal(T: int, trend: float = 0.001) -> np.ndarray:
    """sin(2*pi*t/24) + sin(2*pi*t/168) + trend * t, the reference synthetic."""
    t = np.arange(T, dtype=np.float64)
    return np.sin(2 * np.pi * t / 24) + np.sin(2 * np.pi * t / 168) + trend * t


def noisy_two_period(T: int, sigma: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return two_period_signal(T) + sigma * rng.normal(size=T)


def write_csv(path: Path, values: np.ndarray, channel_names=None, dates=True) -> Path:
    """Write a (channels, T) array as an ETT-style CSV with a date column."""
    values = np.atleast_2d(values)
    m, t = values.shape
    names = channel_names or [f"ch{i}" for i in range(m)]
    lines = []
    header = (["date"] if dates else []) + list(names)
    lines.append(",".join(header))
    for k in range(t):
        row = [f"2020-01-01T{k:06d}"] if dates else []
        row += [repr(float(values[i, k])) for i in range(m)]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")
    return path


def dataset_dir() -> Path | None:
    """Benchmark CSV location: $LDMTS_DATA_DIR, or ./data next to the repo root."""
    env = os.environ.get("LDMTS_DATA_DIR")
    candidates = [Path(env)] if env else []
    candidates.append(Path(__file__).resolve().parent.parent / "data")
    for cand in candidates:
        if cand.is_dir():
            return cand
    return None


def find_dataset(name: str) -> Path | None:
    base = dataset_dir()
    if base is None:
        return None
    path = base / name
    return path if path.is_file() else None


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(name="write_csv")
def write_csv_fixture():
    return write_csv
