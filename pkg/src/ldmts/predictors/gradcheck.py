"""Central finite-difference verification of analytic gradients.

Only meant for toy configurations: every parameter element costs two loss
evaluations, so the parameter count is capped at 10^4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .transformer import DualEmbedConfig, dual_embed_loss_and_grads, param_count

MAX_PARAMS = 10_000


@dataclass
class GradcheckReport:
    """Per-element relative errors between analytic and finite-difference grads."""

    step: float
    floor: float
    n_params: int
    rel_errors: dict[str, np.ndarray]

    def _all(self) -> np.ndarray:
        return np.concatenate([e.ravel() for e in self.rel_errors.values()])

    @property
    def max_rel_error(self) -> float:
        return float(self._all().max())

    @property
    def mean_rel_error(self) -> float:
        return float(self._all().mean())

    def fraction_within(self, tol: float) -> float:
        errors = self._all()
        return float((errors <= tol).mean())

    @property
    def worst(self) -> tuple[str, int]:
        key = max(self.rel_errors, key=lambda k: self.rel_errors[k].max())
        return key, int(self.rel_errors[key].argmax())


def gradcheck(
    loss_and_grads,
    params: dict[str, np.ndarray],
    step: float = 1e-4,
    floor: float = 1e-6,
) -> GradcheckReport:
    """Compare analytic gradients against central differences, element by element.

    ``loss_and_grads(params) -> (loss, grads)`` must be deterministic (no
    dropout or other stochastic ops). Relative error per element is
    |analytic - fd| / max(|analytic|, |fd|, floor); the floor keeps near-zero
    gradients from inflating the ratio. The default step balances the h^2
    truncation error against float64 rounding for losses of order one.
    """
    total = param_count(params)
    if total > MAX_PARAMS:
        raise ValueError(f"{total} parameters exceed the gradcheck cap of {MAX_PARAMS}")
    _, analytic = loss_and_grads(params)
    rel_errors = {}
    for key, p in params.items():
        flat = p.reshape(-1)
        grad = analytic[key].reshape(-1)
        errors = np.empty(flat.size)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            hi = loss_and_grads(params)[0]
            flat[i] = orig - step
            lo = loss_and_grads(params)[0]
            flat[i] = orig
            fd = (hi - lo) / (2.0 * step)
            errors[i] = abs(grad[i] - fd) / max(abs(grad[i]), abs(fd), floor)
        rel_errors[key] = errors.reshape(p.shape)
    return GradcheckReport(step=step, floor=floor, n_params=total, rel_errors=rel_errors)


def gradcheck_dual_embed(
    params: dict[str, np.ndarray],
    batch: tuple,
    config: DualEmbedConfig,
    step: float = 1e-4,
    floor: float = 1e-6,
) -> GradcheckReport:
    """Gradcheck the dual-embedding model on one (inputs, targets) batch."""
    if config.dropout > 0.0:
        raise ValueError("gradcheck requires dropout = 0 (stochastic forward breaks FD)")
    inputs, targets = batch

    def loss_and_grads(ps):
        return dual_embed_loss_and_grads(ps, inputs, targets, config)

    return gradcheck(loss_and_grads, params, step=step, floor=floor)
