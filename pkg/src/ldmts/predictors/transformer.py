"""Dual-embedding transformer encoder in plain numpy with hand-written backprop.

The input window is unfolded into a (c, p) grid of c consecutive patches of
length p. Rows become c patch tokens, columns become p vanilla tokens; each
stream gets its own embedding, learned additive position encoding, and pre-norm
encoder stack. The encoded streams are concatenated, flattened, and mapped to
the horizon by a single linear head.

Gradients are written out manually so they can be verified against central
finite differences (see gradcheck). Activations use exact GELU (erf form) to
keep finite-difference checks clean. All math is float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf
from sklearn.base import BaseEstimator, RegressorMixin

from ..validation import as_sample_matrix, check_positive_int
from .optim import TrainState, adam_step, init_train_state

LN_EPS = 1e-5


@dataclass(frozen=True)
class DualEmbedConfig:
    """Shape and capacity knobs for one dual-embedding predictor."""

    input_length: int
    horizon: int
    patch: int
    d_model: int = 16
    d_ff: int = 32
    n_heads: int = 2
    layers: int = 1
    dropout: float = 0.0

    def __post_init__(self):
        for name in ("input_length", "horizon", "patch", "d_model", "d_ff", "n_heads", "layers"):
            check_positive_int(getattr(self, name), name)
        if self.d_model % self.n_heads != 0:
            raise ValueError(
                f"d_model {self.d_model} not divisible by n_heads {self.n_heads}"
            )
        if self.patch > self.input_length:
            raise ValueError(
                f"patch {self.patch} larger than input length {self.input_length}"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")

    @property
    def n_patches(self) -> int:
        """Token count c of the patch stream (input rounded up to whole patches)."""
        return -(-self.input_length // self.patch)

    @property
    def n_tokens(self) -> int:
        return self.n_patches + self.patch


def unfold2d(s, p: int) -> np.ndarray:
    """Reshape the last axis into (c, p) non-overlapping patches, padding in front.

    Zeros are prepended so the padded length is the smallest multiple of p that
    covers the input; front padding keeps the most recent samples at the end of
    the last row. Works on any leading batch shape.
    """
    p = check_positive_int(p, "p")
    arr = np.asarray(s, dtype=np.float64)
    n = arr.shape[-1]
    if n < 1:
        raise ValueError("cannot unfold an empty sequence")
    c = -(-n // p)
    pad = c * p - n
    if pad:
        arr = np.pad(arr, [(0, 0)] * (arr.ndim - 1) + [(pad, 0)])
    return arr.reshape(arr.shape[:-1] + (c, p))


def init_dual_embed_params(config: DualEmbedConfig, rng) -> dict[str, np.ndarray]:
    """Fresh parameter dict; linear weights get 1/sqrt(fan_in) normal init."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    d, p, c = config.d_model, config.patch, config.n_patches

    def linear(fan_in, fan_out):
        return rng.normal(0.0, 1.0 / math.sqrt(fan_in), size=(fan_in, fan_out))

    params = {
        "embed.patch.w": linear(p, d),
        "embed.patch.b": np.zeros(d),
        "embed.vanilla.w": linear(c, d),
        "embed.vanilla.b": np.zeros(d),
        "pos.patch": rng.normal(0.0, 0.02, size=(c, d)),
        "pos.vanilla": rng.normal(0.0, 0.02, size=(p, d)),
    }
    for stream in ("patch", "vanilla"):
        for layer in range(config.layers):
            pre = f"{stream}.block{layer}"
            params[f"{pre}.ln1.g"] = np.ones(d)
            params[f"{pre}.ln1.b"] = np.zeros(d)
            for proj in ("wq", "wk", "wv", "wo"):
                params[f"{pre}.attn.{proj}"] = linear(d, d)
            for bias in ("bq", "bk", "bv", "bo"):
                params[f"{pre}.attn.{bias}"] = np.zeros(d)
            params[f"{pre}.ln2.g"] = np.ones(d)
            params[f"{pre}.ln2.b"] = np.zeros(d)
            params[f"{pre}.ffn.w1"] = linear(d, config.d_ff)
            params[f"{pre}.ffn.b1"] = np.zeros(config.d_ff)
            params[f"{pre}.ffn.w2"] = linear(config.d_ff, d)
            params[f"{pre}.ffn.b2"] = np.zeros(d)
        params[f"{stream}.final.g"] = np.ones(d)
        params[f"{stream}.final.b"] = np.zeros(d)
    params["head.w"] = linear(config.n_tokens * d, config.horizon)
    params["head.b"] = np.zeros(config.horizon)
    return params


def param_count(params: dict[str, np.ndarray]) -> int:
    return int(sum(p.size for p in params.values()))


# ---------------------------------------------------------------------------
# primitive forward/backward pairs


def _linear_fwd(x, w, b):
    return x @ w + b, (x, w)


def _linear_bwd(dy, cache):
    x, w = cache
    fan_in, fan_out = w.shape
    dw = x.reshape(-1, fan_in).T @ dy.reshape(-1, fan_out)
    db = dy.reshape(-1, fan_out).sum(axis=0)
    return dy @ w.T, dw, db


def _layernorm_fwd(x, gamma, beta):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = np.mean(xc * xc, axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = xc * inv
    return gamma * xhat + beta, (xhat, inv, gamma)


def _layernorm_bwd(dy, cache):
    xhat, inv, gamma = cache
    axes = tuple(range(dy.ndim - 1))
    dgamma = (dy * xhat).sum(axis=axes)
    dbeta = dy.sum(axis=axes)
    dxhat = dy * gamma
    dx = inv * (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    )
    return dx, dgamma, dbeta


_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _gelu_fwd(x):
    return 0.5 * x * (1.0 + erf(x / _SQRT2)), x


def _gelu_bwd(dy, x):
    cdf = 0.5 * (1.0 + erf(x / _SQRT2))
    pdf = np.exp(-0.5 * x * x) * _INV_SQRT_2PI
    return dy * (cdf + x * pdf)


def _dropout_fwd(x, rate, training, rng):
    if not training or rate == 0.0:
        return x, None
    mask = rng.random(x.shape) >= rate
    return x * mask / (1.0 - rate), mask


def _dropout_bwd(dy, mask, rate):
    if mask is None:
        return dy
    return dy * mask / (1.0 - rate)


def _softmax_last(x):
    e = np.exp(x - x.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def _split_heads(x, n_heads):
    b, t, d = x.shape
    return x.reshape(b, t, n_heads, d // n_heads).transpose(0, 2, 1, 3)


def _merge_heads(x):
    b, nh, t, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, nh * dh)


def _attention_fwd(x, params, prefix, config):
    nh = config.n_heads
    q, cq = _linear_fwd(x, params[f"{prefix}.wq"], params[f"{prefix}.bq"])
    k, ck = _linear_fwd(x, params[f"{prefix}.wk"], params[f"{prefix}.bk"])
    v, cv = _linear_fwd(x, params[f"{prefix}.wv"], params[f"{prefix}.bv"])
    qh, kh, vh = _split_heads(q, nh), _split_heads(k, nh), _split_heads(v, nh)
    scale = 1.0 / math.sqrt(config.d_model // nh)
    probs = _softmax_last(qh @ kh.transpose(0, 1, 3, 2) * scale)
    merged = _merge_heads(probs @ vh)
    out, co = _linear_fwd(merged, params[f"{prefix}.wo"], params[f"{prefix}.bo"])
    return out, (cq, ck, cv, qh, kh, vh, probs, co, scale)


def _attention_bwd(dout, cache, grads, prefix, config):
    cq, ck, cv, qh, kh, vh, probs, co, scale = cache
    dmerged, grads[f"{prefix}.wo"], grads[f"{prefix}.bo"] = _linear_bwd(dout, co)
    dctx = _split_heads(dmerged, config.n_heads)
    dprobs = dctx @ vh.transpose(0, 1, 3, 2)
    dvh = probs.transpose(0, 1, 3, 2) @ dctx
    dscores = probs * (dprobs - (dprobs * probs).sum(axis=-1, keepdims=True))
    dqh = dscores @ kh * scale
    dkh = dscores.transpose(0, 1, 3, 2) @ qh * scale
    dxq, grads[f"{prefix}.wq"], grads[f"{prefix}.bq"] = _linear_bwd(_merge_heads(dqh), cq)
    dxk, grads[f"{prefix}.wk"], grads[f"{prefix}.bk"] = _linear_bwd(_merge_heads(dkh), ck)
    dxv, grads[f"{prefix}.wv"], grads[f"{prefix}.bv"] = _linear_bwd(_merge_heads(dvh), cv)
    return dxq + dxk + dxv


def _ffn_fwd(x, params, prefix):
    h, c1 = _linear_fwd(x, params[f"{prefix}.w1"], params[f"{prefix}.b1"])
    g, gc = _gelu_fwd(h)
    out, c2 = _linear_fwd(g, params[f"{prefix}.w2"], params[f"{prefix}.b2"])
    return out, (c1, gc, c2)


def _ffn_bwd(dout, cache, grads, prefix):
    c1, gc, c2 = cache
    dg, grads[f"{prefix}.w2"], grads[f"{prefix}.b2"] = _linear_bwd(dout, c2)
    dh = _gelu_bwd(dg, gc)
    dx, grads[f"{prefix}.w1"], grads[f"{prefix}.b1"] = _linear_bwd(dh, c1)
    return dx


def _encoder_fwd(h, params, stream, config, training, rng):
    blocks = []
    for layer in range(config.layers):
        pre = f"{stream}.block{layer}"
        a, c_ln1 = _layernorm_fwd(h, params[f"{pre}.ln1.g"], params[f"{pre}.ln1.b"])
        attn, c_attn = _attention_fwd(a, params, f"{pre}.attn", config)
        attn, m1 = _dropout_fwd(attn, config.dropout, training, rng)
        h = h + attn
        f, c_ln2 = _layernorm_fwd(h, params[f"{pre}.ln2.g"], params[f"{pre}.ln2.b"])
        ff, c_ffn = _ffn_fwd(f, params, f"{pre}.ffn")
        ff, m2 = _dropout_fwd(ff, config.dropout, training, rng)
        h = h + ff
        blocks.append((c_ln1, c_attn, m1, c_ln2, c_ffn, m2))
    out, c_final = _layernorm_fwd(h, params[f"{stream}.final.g"], params[f"{stream}.final.b"])
    return out, (blocks, c_final)


def _encoder_bwd(dout, cache, grads, stream, config):
    blocks, c_final = cache
    dh, grads[f"{stream}.final.g"], grads[f"{stream}.final.b"] = _layernorm_bwd(dout, c_final)
    for layer in reversed(range(config.layers)):
        pre = f"{stream}.block{layer}"
        c_ln1, c_attn, m1, c_ln2, c_ffn, m2 = blocks[layer]
        dff = _dropout_bwd(dh, m2, config.dropout)
        df = _ffn_bwd(dff, c_ffn, grads, f"{pre}.ffn")
        dln2, grads[f"{pre}.ln2.g"], grads[f"{pre}.ln2.b"] = _layernorm_bwd(df, c_ln2)
        dh = dh + dln2
        dattn = _dropout_bwd(dh, m1, config.dropout)
        da = _attention_bwd(dattn, c_attn, grads, f"{pre}.attn", config)
        dln1, grads[f"{pre}.ln1.g"], grads[f"{pre}.ln1.b"] = _layernorm_bwd(da, c_ln1)
        dh = dh + dln1
    return dh


# ---------------------------------------------------------------------------
# full model


def dual_embed_forward(
    params: dict[str, np.ndarray],
    s2d,
    config: DualEmbedConfig,
    training: bool = False,
    rng: np.random.Generator | None = None,
    with_cache: bool = False,
):
    """Map unfolded inputs (c, p) or (batch, c, p) to horizon outputs.

    Eval mode (the default) is deterministic. Training mode applies dropout and
    requires an rng when the configured rate is positive. With ``with_cache``
    the returned cache feeds :func:`dual_embed_backward`.
    """
    x2d = np.asarray(s2d, dtype=np.float64)
    single = x2d.ndim == 2
    if single:
        x2d = x2d[np.newaxis]
    c, p = config.n_patches, config.patch
    if x2d.ndim != 3 or x2d.shape[1:] != (c, p):
        raise ValueError(f"expected input shape (batch, {c}, {p}), got {x2d.shape}")
    if training and config.dropout > 0.0 and rng is None:
        raise ValueError("training with dropout > 0 requires an rng")

    emb_p, c_emb_p = _linear_fwd(x2d, params["embed.patch.w"], params["embed.patch.b"])
    tok_p, m_p = _dropout_fwd(emb_p + params["pos.patch"], config.dropout, training, rng)
    emb_v, c_emb_v = _linear_fwd(
        x2d.transpose(0, 2, 1), params["embed.vanilla.w"], params["embed.vanilla.b"]
    )
    tok_v, m_v = _dropout_fwd(emb_v + params["pos.vanilla"], config.dropout, training, rng)

    enc_p, cache_p = _encoder_fwd(tok_p, params, "patch", config, training, rng)
    enc_v, cache_v = _encoder_fwd(tok_v, params, "vanilla", config, training, rng)

    flat = np.concatenate([enc_p, enc_v], axis=1).reshape(x2d.shape[0], -1)
    out, c_head = _linear_fwd(flat, params["head.w"], params["head.b"])
    if not np.isfinite(out).all():
        raise FloatingPointError("non-finite activations in forward pass (diverged training?)")

    if not with_cache:
        return out[0] if single else out
    cache = {
        "config": config,
        "emb_p": c_emb_p,
        "emb_v": c_emb_v,
        "m_p": m_p,
        "m_v": m_v,
        "patch": cache_p,
        "vanilla": cache_v,
        "head": c_head,
        "single": single,
    }
    return (out[0] if single else out), cache


def dual_embed_backward(
    params: dict[str, np.ndarray], cache: dict, dout
) -> dict[str, np.ndarray]:
    """Gradients of every parameter given d(loss)/d(output)."""
    config = cache["config"]
    dout = np.asarray(dout, dtype=np.float64)
    if cache["single"] and dout.ndim == 1:
        dout = dout[np.newaxis]
    grads: dict[str, np.ndarray] = {}
    dflat, grads["head.w"], grads["head.b"] = _linear_bwd(dout, cache["head"])
    c, d = config.n_patches, config.d_model
    dtokens = dflat.reshape(dout.shape[0], config.n_tokens, d)
    denc_p = _encoder_bwd(dtokens[:, :c], cache["patch"], grads, "patch", config)
    denc_v = _encoder_bwd(dtokens[:, c:], cache["vanilla"], grads, "vanilla", config)

    dtok_p = _dropout_bwd(denc_p, cache["m_p"], config.dropout)
    grads["pos.patch"] = dtok_p.sum(axis=0)
    _, grads["embed.patch.w"], grads["embed.patch.b"] = _linear_bwd(dtok_p, cache["emb_p"])

    dtok_v = _dropout_bwd(denc_v, cache["m_v"], config.dropout)
    grads["pos.vanilla"] = dtok_v.sum(axis=0)
    _, grads["embed.vanilla.w"], grads["embed.vanilla.b"] = _linear_bwd(dtok_v, cache["emb_v"])
    return grads


def dual_embed_loss_and_grads(
    params, inputs, targets, config, training=False, rng=None
) -> tuple[float, dict[str, np.ndarray]]:
    """MSE loss over a batch plus gradients for every parameter."""
    targets = np.asarray(targets, dtype=np.float64)
    out, cache = dual_embed_forward(
        params, inputs, config, training=training, rng=rng, with_cache=True
    )
    if out.shape != targets.shape:
        raise ValueError(f"output shape {out.shape} != target shape {targets.shape}")
    resid = out - targets
    loss = float(np.mean(resid * resid))
    grads = dual_embed_backward(params, cache, 2.0 * resid / resid.size)
    return loss, grads


def train_step(
    params: dict[str, np.ndarray],
    state: TrainState,
    batch: tuple,
    config: DualEmbedConfig,
    rng: np.random.Generator | None = None,
) -> tuple[dict[str, np.ndarray], TrainState, float]:
    """One Adam step on the MSE of a batch; aborts on a non-finite loss."""
    inputs, targets = batch
    loss, grads = dual_embed_loss_and_grads(
        params, inputs, targets, config, training=True, rng=rng
    )
    if not math.isfinite(loss):
        worst = max(params, key=lambda k: np.abs(params[k]).max())
        raise FloatingPointError(
            f"loss {loss!r} at step {state.step + 1} "
            f"(largest parameter {worst!r}, |max| = {np.abs(params[worst]).max():.3g}); "
            "lower the learning rate"
        )
    adam_step(params, grads, state)
    return params, state, loss


class DualEmbedPredictor(RegressorMixin, BaseEstimator):
    """Sklearn-style wrapper: minibatch Adam training of the dual-embed encoder.

    ``fit`` accepts flattened history rows (n, L) and future rows (n, H); the
    patch unfolding happens internally. With ``validation_data`` the fit keeps
    the parameters of the best validation epoch and stops early after
    ``patience`` epochs without improvement.
    """

    def __init__(
        self,
        patch: int = 4,
        d_model: int = 16,
        d_ff: int = 32,
        n_heads: int = 2,
        layers: int = 1,
        dropout: float = 0.0,
        lr: float = 1e-3,
        batch_size: int = 32,
        max_epochs: int = 50,
        patience: int = 5,
        seed: int = 0,
    ):
        self.patch = patch
        self.d_model = d_model
        self.d_ff = d_ff
        self.n_heads = n_heads
        self.layers = layers
        self.dropout = dropout
        self.lr = lr
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.seed = seed

    def fit(self, X, y, validation_data=None):
        X = as_sample_matrix(X, "X")
        y = as_sample_matrix(y, "y")
        if y.shape[0] != X.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        config = DualEmbedConfig(
            input_length=X.shape[1],
            horizon=y.shape[1],
            patch=self.patch,
            d_model=self.d_model,
            d_ff=self.d_ff,
            n_heads=self.n_heads,
            layers=self.layers,
            dropout=self.dropout,
        )
        rng = np.random.default_rng(self.seed)
        params = init_dual_embed_params(config, rng)
        state = init_train_state(params, lr=self.lr, batch_size=self.batch_size, seed=self.seed)
        x2d = unfold2d(X, self.patch)
        if validation_data is not None:
            x_val = unfold2d(as_sample_matrix(validation_data[0], "X_val"), self.patch)
            y_val = as_sample_matrix(validation_data[1], "y_val")

        n = X.shape[0]
        best_params = None
        best_val = math.inf
        stale = 0
        loss_curve, val_curve = [], []
        for _epoch in range(self.max_epochs):
            order = rng.permutation(n)
            total = 0.0
            for start in range(0, n, self.batch_size):
                idx = order[start : start + self.batch_size]
                _, _, loss = train_step(params, state, (x2d[idx], y[idx]), config, rng)
                total += loss * idx.size
            loss_curve.append(total / n)
            if validation_data is None:
                continue
            val_pred = dual_embed_forward(params, x_val, config)
            val_mse = float(np.mean((val_pred - y_val) ** 2))
            val_curve.append(val_mse)
            if val_mse < best_val:
                best_val = val_mse
                best_params = {k: p.copy() for k, p in params.items()}
                stale = 0
            else:
                stale += 1
                if stale >= self.patience:
                    break

        self.params_ = best_params if best_params is not None else params
        self.config_ = config
        self.state_ = state
        self.loss_curve_ = loss_curve
        self.val_curve_ = val_curve
        self.best_val_mse_ = best_val if validation_data is not None else None
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "params_"):
            raise RuntimeError("predictor is not fitted")
        X = as_sample_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, predictor was fit with {self.n_features_in_}"
            )
        return dual_embed_forward(self.params_, unfold2d(X, self.patch), self.config_)
