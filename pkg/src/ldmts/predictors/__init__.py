"""Per-scale predictor backends."""

from .gradcheck import GradcheckReport, gradcheck, gradcheck_dual_embed
from .linear import RidgePredictor
from .optim import TrainState, adam_step, init_train_state
from .transformer import (
    DualEmbedConfig,
    DualEmbedPredictor,
    dual_embed_backward,
    dual_embed_forward,
    dual_embed_loss_and_grads,
    init_dual_embed_params,
    param_count,
    train_step,
    unfold2d,
)

__all__ = [
    "DualEmbedConfig",
    "DualEmbedPredictor",
    "GradcheckReport",
    "RidgePredictor",
    "TrainState",
    "adam_step",
    "dual_embed_backward",
    "dual_embed_forward",
    "dual_embed_loss_and_grads",
    "gradcheck",
    "gradcheck_dual_embed",
    "init_dual_embed_params",
    "init_train_state",
    "param_count",
    "train_step",
    "unfold2d",
]
