"""Adam over named parameter dictionaries.

Parameters and gradients are plain ``dict[str, np.ndarray]`` keyed by the same
names; the optimizer state carries per-parameter moment accumulators. The decay
constants are the standard beta1=0.9, beta2=0.999, eps=1e-8 and are fixed on
purpose: only the learning rate is a tunable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


@dataclass
class TrainState:
    """Optimizer state: step count, Adam moments, and the run's knobs."""

    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    lr: float = 1e-3
    batch_size: int = 32
    seed: int = 0


def init_train_state(
    params: dict[str, np.ndarray],
    lr: float = 1e-3,
    batch_size: int = 32,
    seed: int = 0,
) -> TrainState:
    if lr <= 0:
        raise ValueError(f"lr must be positive, got {lr}")
    return TrainState(
        step=0,
        m={k: np.zeros_like(p) for k, p in params.items()},
        v={k: np.zeros_like(p) for k, p in params.items()},
        lr=float(lr),
        batch_size=int(batch_size),
        seed=int(seed),
    )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: TrainState,
) -> tuple[dict[str, np.ndarray], TrainState]:
    """One Adam update, in place on ``params`` and ``state``.

    Missing gradient keys are treated as zero-gradient (the moments still
    decay); unknown gradient keys are an error.
    """
    unknown = set(grads) - set(params)
    if unknown:
        raise KeyError(f"gradients for unknown parameters: {sorted(unknown)}")
    state.step += 1
    t = state.step
    bias1 = 1.0 - BETA1**t
    bias2 = 1.0 - BETA2**t
    for key, p in params.items():
        g = grads.get(key)
        if g is None:
            g = np.zeros_like(p)
        elif g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape} for {key!r}")
        m = state.m[key]
        v = state.v[key]
        m *= BETA1
        m += (1.0 - BETA1) * g
        v *= BETA2
        v += (1.0 - BETA2) * g * g
        p -= state.lr * (m / bias1) / (np.sqrt(v / bias2) + EPS)
    return params, state
