"""Versioned JSON reports and run manifests.

Reports are written with sorted keys and floats rounded to 6 significant
digits, so two runs of the same seeded experiment produce byte-identical files
once the counter fields (wall clock, peak memory) are excluded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

COUNTER_KEYS = ("counters", "timings")


def _normalize(obj):
    """Make a payload JSON-ready: 6-significant-digit floats, plain containers."""
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.6g}")
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, np.ndarray):
        return _normalize(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def emit_report(report, path) -> dict:
    """Write a report (dict or object with to_dict) as stable JSON; returns the payload."""
    payload = report.to_dict() if hasattr(report, "to_dict") else dict(report)
    payload = _normalize(payload)
    payload["schema_version"] = SCHEMA_VERSION
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return payload


def load_report(path) -> dict:
    return json.loads(Path(path).read_text())


def strip_counters(payload: dict) -> dict:
    """Drop the non-deterministic counter fields for run-to-run comparisons."""
    return {k: v for k, v in payload.items() if k not in COUNTER_KEYS}


@dataclass
class RunManifest:
    """Everything needed to reproduce a run bit-identically, plus timings."""

    config_sha256: str
    dataset: dict
    seed: int
    tool_version: str
    command: str = ""
    resolved_params: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config_sha256": self.config_sha256,
            "dataset": dict(self.dataset),
            "seed": self.seed,
            "tool_version": self.tool_version,
            "command": self.command,
            "resolved_params": dict(self.resolved_params),
            "timings": dict(self.timings),
        }
