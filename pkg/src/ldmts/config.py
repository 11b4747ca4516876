"""Flat key=value run configuration.

The schema mirrors the hyperparameter table of the benchmark setup: model keys
(layers, d_model, d_ff, n_heads, lr, batch_size, scale_set, dropout,
input_size) plus harness keys (horizon, eta, loss_mode, seed, stride, backend,
ridge_lambda, max_epochs, patience). Lines are ``key = value``; blank lines and
``#`` comments are ignored.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields
from pathlib import Path

from .multiscale import parse_eta
from .pipeline import BACKENDS, LOSS_MODES


@dataclass
class RunConfig:
    """One experiment's knobs, with the common defaults."""

    layers: int = 1
    d_model: int = 16
    d_ff: int = 32
    n_heads: int = 2
    lr: float = 1e-3
    batch_size: int = 128
    scale_set: tuple[int, ...] = (24, 168)
    dropout: float = 0.0
    input_size: tuple[int, ...] = (336,)
    horizon: int = 96
    eta: float = 1.0
    loss_mode: str | None = None
    seed: int = 0
    stride: int = 1
    backend: str = "linear"
    ridge_lambda: float = 1e-3
    max_epochs: int = 50
    patience: int = 5

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.loss_mode is not None and self.loss_mode not in LOSS_MODES:
            raise ValueError(
                f"loss_mode must be one of {LOSS_MODES} (or empty), got {self.loss_mode!r}"
            )
        if not 1 <= len(self.input_size) <= 2:
            raise ValueError(
                f"input_size takes one or two lengths, got {self.input_size!r}"
            )

    def input_length(self) -> int:
        """Pick the input length for the configured horizon.

        With two sizes "a;b", a serves horizons up to 192 and b the longer
        ones, following the two-tier convention of the benchmark table.
        """
        if len(self.input_size) == 1 or self.horizon <= 192:
            return self.input_size[0]
        return self.input_size[1]

    def forecaster_params(self) -> dict:
        """Keyword arguments for LdmForecaster."""
        return {
            "scales": self.scale_set,
            "eta": self.eta,
            "input_length": self.input_length(),
            "horizon": self.horizon,
            "backend": self.backend,
            "loss_mode": self.loss_mode,
            "ridge_lambda": self.ridge_lambda,
            "layers": self.layers,
            "d_model": self.d_model,
            "d_ff": self.d_ff,
            "n_heads": self.n_heads,
            "dropout": self.dropout,
            "lr": self.lr,
            "batch_size": self.batch_size,
            "max_epochs": self.max_epochs,
            "patience": self.patience,
            "stride": self.stride,
            "seed": self.seed,
        }


def _parse_int_tuple(text: str, sep: str, key: str) -> tuple[int, ...]:
    body = text.strip().strip("{}")
    try:
        return tuple(int(part.strip()) for part in body.split(sep) if part.strip())
    except ValueError as exc:
        raise ValueError(f"cannot parse {key} value {text!r}") from exc


_PARSERS = {
    "layers": int,
    "d_model": int,
    "d_ff": int,
    "n_heads": int,
    "lr": float,
    "batch_size": int,
    "scale_set": lambda v: _parse_int_tuple(v, ",", "scale_set"),
    "dropout": float,
    "input_size": lambda v: _parse_int_tuple(v, ";", "input_size"),
    "horizon": int,
    "eta": parse_eta,
    "loss_mode": lambda v: v.strip() or None,
    "seed": int,
    "stride": int,
    "backend": str.strip,
    "ridge_lambda": float,
    "max_epochs": int,
    "patience": int,
}

assert set(_PARSERS) == {f.name for f in fields(RunConfig)}


def parse_config(text: str) -> RunConfig:
    """Parse key=value lines into a RunConfig; unknown keys are an error."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _PARSERS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value.strip())
        except ValueError as exc:
            raise ValueError(f"config line {lineno}: {exc}") from exc
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def config_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
