"""Network definition with exact analytic gradients.

Text branch: embedding lookup -> 1D convolution (valid padding, ReLU) ->
inverted dropout (training only) -> max pooling -> LSTM, final hidden
state -> dense ReLU. Metadata branch: dense ReLU. The two 16-unit outputs
are concatenated, passed through a dense ReLU head and a 3-way softmax.

Everything is float64. backward_batch returns the exact gradient of the
batch-mean cross-entropy for every parameter, including backprop through
the pooling argmax, the convolution and the LSTM recurrence.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from ..errors import NumericError

PARAM_NAMES = (
    "embedding",
    "conv_w", "conv_b",
    "lstm_wi", "lstm_wf", "lstm_wg", "lstm_wo",
    "lstm_bi", "lstm_bf", "lstm_bg", "lstm_bo",
    "text_w", "text_b",
    "meta_w", "meta_b",
    "head_w", "head_b",
    "out_w", "out_b",
)


@dataclass
class ModelConfig:
    """Architecture sizes. The conv/dropout/LSTM/dense defaults are the

    reference architecture constants; override them only deliberately
    (the tests use a miniature configuration for gradient checking)."""

    vocab_size: int
    metadata_dim: int
    seq_len: int = 100
    embed_dim: int = 64
    conv_filters: int = 128
    conv_kernel: int = 6
    dropout_p: float = 0.2
    pool_size: int = 2
    lstm_units: int = 32
    text_dense: int = 16
    meta_dense: int = 16
    head_dense: int = 16
    n_classes: int = 3

    @property
    def conv_len(self) -> int:
        return self.seq_len - self.conv_kernel + 1

    @property
    def pooled_len(self) -> int:
        return (self.conv_len - self.pool_size) // self.pool_size + 1

    def validate(self):
        if self.seq_len < self.conv_kernel:
            raise ValueError("seq_len must be >= conv_kernel")
        if self.conv_len < self.pool_size:
            raise ValueError("conv output shorter than the pooling window")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError("dropout_p must be in [0, 1)")

    def to_dict(self):
        return asdict(self)


@dataclass
class ModelParams:
    """All trainable weights, keyed by PARAM_NAMES."""

    arrays: dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, name):
        return self.arrays[name]

    def __setitem__(self, name, value):
        self.arrays[name] = value

    def copy(self):
        return ModelParams({k: v.copy() for k, v in self.arrays.items()})


def _shapes(cfg: ModelConfig) -> dict[str, tuple]:
    gate_in = cfg.conv_filters + cfg.lstm_units
    concat = cfg.text_dense + cfg.meta_dense
    shapes = {
        "embedding": (cfg.vocab_size + 2, cfg.embed_dim),
        "conv_w": (cfg.conv_kernel, cfg.embed_dim, cfg.conv_filters),
        "conv_b": (cfg.conv_filters,),
        "text_w": (cfg.lstm_units, cfg.text_dense),
        "text_b": (cfg.text_dense,),
        "meta_w": (cfg.metadata_dim, cfg.meta_dense),
        "meta_b": (cfg.meta_dense,),
        "head_w": (concat, cfg.head_dense),
        "head_b": (cfg.head_dense,),
        "out_w": (cfg.head_dense, cfg.n_classes),
        "out_b": (cfg.n_classes,),
    }
    for gate in "ifgo":
        shapes[f"lstm_w{gate}"] = (gate_in, cfg.lstm_units)
        shapes[f"lstm_b{gate}"] = (cfg.lstm_units,)
    return shapes


def _fan_in(name, shape, cfg):
    if name == "embedding":
        return cfg.embed_dim
    if name == "conv_w":
        return cfg.conv_kernel * cfg.embed_dim
    return shape[0]


def init_params(cfg: ModelConfig, seed: int = 0) -> ModelParams:
    """Seeded uniform(+-1/sqrt(fan_in)) weights, zero biases."""
    cfg.validate()
    rng = np.random.default_rng(seed)
    shapes = _shapes(cfg)
    params = ModelParams()
    for name in PARAM_NAMES:
        shape = shapes[name]
        if name.endswith("_b") or name.startswith("lstm_b"):
            params[name] = np.zeros(shape)
        else:
            bound = 1.0 / np.sqrt(_fan_in(name, shape, cfg))
            params[name] = rng.uniform(-bound, bound, size=shape)
    return params


def zero_grads(cfg: ModelConfig) -> dict[str, np.ndarray]:
    return {name: np.zeros(shape) for name, shape in _shapes(cfg).items()}


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=1, keepdims=True)


def forward_batch(params: ModelParams, cfg: ModelConfig, tokens, metadata,
                  train_mode: bool = False, dropout_seed: int = 0):
    """Run the network on a batch. Returns (probs, cache).

    tokens: (B, seq_len) int ids; metadata: (B, metadata_dim), already
    standardized with training-set statistics. Dropout only applies in
    train mode and draws its mask from dropout_seed, so a fixed seed makes
    the whole forward pass a deterministic function of the parameters.
    """
    tokens = np.asarray(tokens)
    metadata = np.asarray(metadata, dtype=float)
    if tokens.ndim != 2 or tokens.shape[1] != cfg.seq_len:
        raise NumericError(f"tokens must be (B, {cfg.seq_len})")
    if metadata.shape != (tokens.shape[0], cfg.metadata_dim):
        raise NumericError(f"metadata must be (B, {cfg.metadata_dim})")
    if not np.isfinite(metadata).all():
        raise NumericError("metadata contains non-finite values")
    B = tokens.shape[0]
    K, E, F, H = cfg.conv_kernel, cfg.embed_dim, cfg.conv_filters, cfg.lstm_units
    Tc, Tp = cfg.conv_len, cfg.pooled_len

    X = params["embedding"][tokens]                      # (B, L, E)
    windows = np.lib.stride_tricks.sliding_window_view(X, K, axis=1)
    Xc = np.ascontiguousarray(windows.transpose(0, 1, 3, 2)).reshape(B, Tc, K * E)
    Wc = params["conv_w"].reshape(K * E, F)
    Zc = Xc.reshape(B * Tc, K * E) @ Wc
    Zc = Zc.reshape(B, Tc, F) + params["conv_b"]
    relu_mask = Zc > 0
    A = Zc * relu_mask

    if train_mode and cfg.dropout_p > 0:
        drop_rng = np.random.default_rng(dropout_seed)
        keep = 1.0 - cfg.dropout_p
        drop_mask = (drop_rng.random(A.shape) < keep) / keep
        A = A * drop_mask
    else:
        drop_mask = None

    view = A[:, : Tp * cfg.pool_size, :].reshape(B, Tp, cfg.pool_size, F)
    pool_arg = view.argmax(axis=2)                       # ties -> first
    P = np.take_along_axis(view, pool_arg[:, :, None, :], axis=2)[:, :, 0, :]

    # The LSTM state is read at the last pooled step still influenced by a
    # real (non-pad) token. Sequences are tail-padded, so reading at step
    # Tp-1 would push the content through a long run of identical pad
    # inputs that erases it; this is the usual masked-sequence readout.
    nonzero = tokens > 0
    last_real = np.where(
        nonzero.any(axis=1), cfg.seq_len - 1 - np.argmax(nonzero[:, ::-1], axis=1), 0
    )
    valid_conv = np.clip(last_real + 1, 1, Tc)
    readout_step = np.clip((valid_conv + cfg.pool_size - 1) // cfg.pool_size, 1, Tp) - 1

    Wz = np.hstack([params[f"lstm_w{g}"] for g in "ifgo"])   # (F+H, 4H)
    bz = np.concatenate([params[f"lstm_b{g}"] for g in "ifgo"])
    x_part = P.reshape(B * Tp, F) @ Wz[:F] + bz
    x_part = x_part.reshape(B, Tp, 4 * H)
    Wh = Wz[F:]                                          # (H, 4H)
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    steps = []
    h_all = np.empty((B, Tp, H))
    for t in range(Tp):
        z = x_part[:, t] + h @ Wh
        i = _sigmoid(z[:, :H])
        f = _sigmoid(z[:, H:2 * H])
        g = np.tanh(z[:, 2 * H:3 * H])
        o = _sigmoid(z[:, 3 * H:])
        c_new = f * c + i * g
        tanh_c = np.tanh(c_new)
        h_new = o * tanh_c
        steps.append((i, f, g, o, c, h, tanh_c))
        h, c = h_new, c_new
        h_all[:, t] = h
    h = h_all[np.arange(B), readout_step]

    text_pre = h @ params["text_w"] + params["text_b"]
    text_out = np.maximum(text_pre, 0.0)
    meta_pre = metadata @ params["meta_w"] + params["meta_b"]
    meta_out = np.maximum(meta_pre, 0.0)
    concat = np.hstack([text_out, meta_out])
    head_pre = concat @ params["head_w"] + params["head_b"]
    head_out = np.maximum(head_pre, 0.0)
    logits = head_out @ params["out_w"] + params["out_b"]
    probs = _softmax(logits)
    if not np.isfinite(probs).all():
        raise NumericError("non-finite activations in forward pass")

    cache = {
        "tokens": tokens, "metadata": metadata, "X": X, "Xc": Xc,
        "relu_mask": relu_mask, "drop_mask": drop_mask, "pool_arg": pool_arg,
        "P": P, "steps": steps, "h_final": h, "readout_step": readout_step,
        "text_pre": text_pre, "text_out": text_out, "meta_pre": meta_pre,
        "meta_out": meta_out, "concat": concat, "head_pre": head_pre,
        "head_out": head_out, "probs": probs,
    }
    return probs, cache


def forward(params, cfg, tokens, metadata, train_mode: bool = False, seed: int = 0):
    """Single-example convenience wrapper; returns the class probabilities."""
    probs, _ = forward_batch(
        params, cfg, np.asarray(tokens)[None, :], np.asarray(metadata)[None, :],
        train_mode=train_mode, dropout_seed=seed,
    )
    return probs[0]


def cross_entropy(probs, one_hot) -> float:
    """-sum(y log p) with p clamped to [1e-12, 1]."""
    p = np.clip(np.asarray(probs, dtype=float), 1e-12, 1.0)
    return float(-(np.asarray(one_hot) * np.log(p)).sum())


def batch_mean_loss(probs, one_hot) -> float:
    """Mean cross-entropy over a batch of probability rows."""
    p = np.clip(np.asarray(probs, dtype=float), 1e-12, 1.0)
    return float(-(np.asarray(one_hot) * np.log(p)).sum(axis=1).mean())


def backward_batch(params: ModelParams, cfg: ModelConfig, cache, one_hot):
    """Exact gradients of the batch-mean cross-entropy w.r.t. every

    parameter. Requires the cache of the matching forward_batch call."""
    B = cache["probs"].shape[0]
    K, E, F, H = cfg.conv_kernel, cfg.embed_dim, cfg.conv_filters, cfg.lstm_units
    Tc, Tp = cfg.conv_len, cfg.pooled_len
    grads = {}

    dlogits = (cache["probs"] - np.asarray(one_hot, dtype=float)) / B
    grads["out_w"] = cache["head_out"].T @ dlogits
    grads["out_b"] = dlogits.sum(axis=0)
    dhead = (dlogits @ params["out_w"].T) * (cache["head_pre"] > 0)
    grads["head_w"] = cache["concat"].T @ dhead
    grads["head_b"] = dhead.sum(axis=0)
    dconcat = dhead @ params["head_w"].T

    dtext = dconcat[:, : cfg.text_dense] * (cache["text_pre"] > 0)
    grads["text_w"] = cache["h_final"].T @ dtext
    grads["text_b"] = dtext.sum(axis=0)
    dh_readout = dtext @ params["text_w"].T

    dmeta = dconcat[:, cfg.text_dense:] * (cache["meta_pre"] > 0)
    grads["meta_w"] = cache["metadata"].T @ dmeta
    grads["meta_b"] = dmeta.sum(axis=0)

    Wz = np.hstack([params[f"lstm_w{g}"] for g in "ifgo"])
    dWz = np.zeros_like(Wz)
    dbz = np.zeros(4 * H)
    dP = np.zeros((B, Tp, F))
    dh = np.zeros((B, H))
    dc = np.zeros((B, H))
    readout = cache["readout_step"]
    for t in range(Tp - 1, -1, -1):
        i, f, g, o, c_prev, h_prev, tanh_c = cache["steps"][t]
        # rows whose readout sits at this step receive the head gradient here
        dh = dh + (readout == t)[:, None] * dh_readout
        do = dh * tanh_c
        dc_total = dc + dh * o * (1.0 - tanh_c ** 2)
        di = dc_total * g
        df = dc_total * c_prev
        dg = dc_total * i
        dzi = di * i * (1.0 - i)
        dzf = df * f * (1.0 - f)
        dzg = dg * (1.0 - g ** 2)
        dzo = do * o * (1.0 - o)
        dz = np.hstack([dzi, dzf, dzg, dzo])
        zin = np.hstack([cache["P"][:, t], h_prev])
        dWz += zin.T @ dz
        dbz += dz.sum(axis=0)
        dzin = dz @ Wz.T
        dP[:, t] = dzin[:, :F]
        dh = dzin[:, F:]
        dc = dc_total * f
    for gi, gate in enumerate("ifgo"):
        grads[f"lstm_w{gate}"] = dWz[:, gi * H:(gi + 1) * H]
        grads[f"lstm_b{gate}"] = dbz[gi * H:(gi + 1) * H]

    # un-pool: route gradient to each window's argmax position
    dview = np.zeros((B, Tp, cfg.pool_size, F))
    np.put_along_axis(dview, cache["pool_arg"][:, :, None, :], dP[:, :, None, :], axis=2)
    dA = np.zeros((B, Tc, F))
    dA[:, : Tp * cfg.pool_size, :] = dview.reshape(B, Tp * cfg.pool_size, F)

    if cache["drop_mask"] is not None:
        dA = dA * cache["drop_mask"]
    dZc = dA * cache["relu_mask"]

    dZc2 = dZc.reshape(B * Tc, F)
    Xc2 = cache["Xc"].reshape(B * Tc, K * E)
    grads["conv_w"] = (Xc2.T @ dZc2).reshape(K, E, F)
    grads["conv_b"] = dZc2.sum(axis=0)
    dXc = (dZc2 @ params["conv_w"].reshape(K * E, F).T).reshape(B, Tc, K, E)
    dX = np.zeros_like(cache["X"])
    for t in range(Tc):
        dX[:, t:t + K, :] += dXc[:, t]

    dE = np.zeros_like(params["embedding"])
    np.add.at(dE, cache["tokens"].reshape(-1), dX.reshape(-1, E))
    grads["embedding"] = dE
    return grads
