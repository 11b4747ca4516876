"""CSV ingestion for ETT-style benchmark files.

Expected layout: a header row, an optional leading date column (name
configurable, content not interpreted), and numeric value columns. Channels
come out in header order.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .series import TimeSeries


@dataclass(frozen=True)
class DatasetSource:
    """Where and how to read one dataset."""

    path: str
    target_column: str | None = None
    date_column: str = "date"


def ingest_csv(
    src,
    target_column: str | None = None,
    date_column: str = "date",
) -> TimeSeries:
    """Read a CSV into a (channels, time) TimeSeries.

    ``target_column`` selects a single channel (univariate mode). Any cell
    that does not parse as a finite number fails with the data row index
    (0-based, header excluded) and column name.
    """
    if isinstance(src, DatasetSource):
        target_column = src.target_column
        date_column = src.date_column
        src = src.path
    path = Path(src)
    if not path.is_file():
        raise FileNotFoundError(f"no such dataset: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as exc:
        raise ValueError(f"{path} is empty") from exc
    if frame.shape[0] == 0:
        raise ValueError(f"{path} has a header but no data rows")
    if date_column in frame.columns:
        frame = frame.drop(columns=[date_column])
    if target_column is not None:
        if target_column not in frame.columns:
            raise ValueError(
                f"target column {target_column!r} not in {list(frame.columns)}"
            )
        frame = frame[[target_column]]
    if frame.shape[1] == 0:
        raise ValueError(f"{path} has no value columns")

    channels = np.empty((frame.shape[1], frame.shape[0]))
    for j, name in enumerate(frame.columns):
        raw = frame[name]
        values = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=np.float64)
        bad = ~np.isfinite(values)
        if bad.any():
            row = int(np.argmax(bad))
            raise ValueError(
                f"{path}: row {row}, column {name!r}: "
                f"cannot use value {raw.iloc[row]!r}"
            )
        channels[j] = values
    return TimeSeries(
        values=channels, name=path.stem, channel_names=tuple(frame.columns)
    )


def dataset_fingerprint(path) -> dict:
    """Row count, column names, and content hash for run manifests."""
    path = Path(path)
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    with open(path) as fh:
        header = fh.readline().strip()
        rows = sum(1 for _ in fh)
    return {
        "path": path.name,
        "rows": rows,
        "columns": header.split(","),
        "sha256": digest,
    }
