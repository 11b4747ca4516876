"""Logsparse tail truncation: cap each component at a scale-dependent budget.

Coarse components carry information over long spans, so they may keep more
samples relative to their scale. The kept budget for a component produced at
scale p is floor(p / eta) samples; the most recent samples are kept. eta = 1
keeps exactly one window of the producing scale at level 0, smaller eta keeps
proportionally more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .multiscale import Component, Decomposition, parse_eta


def truncate_length(scale: int, length: int, eta: float) -> int:
    """Number of samples kept: min(floor(scale / eta), length), at least 1."""
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    eta = parse_eta(eta)
    return max(1, min(math.floor(scale / eta), length))


def tail_indices(kept: int, rate: int, source_length: int) -> np.ndarray:
    """Original-time indices of a component's last ``kept`` samples.

    Downsampling trims from the front, so sample k of a rate-r component
    summarizes a block ending at original step T - 1 - (K - 1 - k) * r. Useful
    for aligning (truncated) components against the raw series.
    """
    if kept < 1:
        raise ValueError(f"kept must be >= 1, got {kept}")
    if rate < 1:
        raise ValueError(f"rate must be >= 1, got {rate}")
    if (kept - 1) * rate >= source_length:
        raise ValueError(
            f"{kept} samples at rate {rate} cannot fit a source of length {source_length}"
        )
    last = source_length - 1
    return last - rate * np.arange(kept - 1, -1, -1, dtype=np.intp)


def truncate_tail(component: Component, eta: float) -> Component:
    """Keep the last ``truncate_length(scale, length, eta)`` samples of a component."""
    kept = truncate_length(component.scale, component.kept_length, eta)
    if kept == component.kept_length:
        return component
    series = component.series.slice_time(component.kept_length - kept, component.kept_length)
    return replace(component, series=series, kept_length=kept)


@dataclass(frozen=True)
class TruncationPlan:
    """Record of a truncation pass: per-component budgets and kept lengths."""

    eta: float
    scales: tuple[int, ...]
    budgets: tuple[int, ...]
    full_lengths: tuple[int, ...]
    kept_lengths: tuple[int, ...]


def plan_truncation(decomposition: Decomposition, eta: float | None = None) -> TruncationPlan:
    """Compute budgets and kept lengths without touching the data."""
    eta = parse_eta(decomposition.scale_set.eta if eta is None else eta)
    scales = tuple(c.scale for c in decomposition.components)
    budgets = tuple(math.floor(s / eta) for s in scales)
    full = tuple(c.kept_length for c in decomposition.components)
    kept = tuple(max(1, min(b, n)) for b, n in zip(budgets, full))
    return TruncationPlan(
        eta=eta, scales=scales, budgets=budgets, full_lengths=full, kept_lengths=kept
    )


def truncate_decomposition(
    decomposition: Decomposition, eta: float | None = None
) -> tuple[Decomposition, TruncationPlan]:
    """Apply logsparse truncation to every component of a decomposition.

    ``eta`` defaults to the value carried by the decomposition's scale set.
    Truncation is idempotent: re-truncating at the same eta is a no-op.
    """
    plan = plan_truncation(decomposition, eta)
    components = tuple(
        truncate_tail(c, plan.eta) for c in decomposition.components
    )
    return replace(decomposition, components=components), plan
