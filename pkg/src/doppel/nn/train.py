"""Adam training loop and prediction helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    ModelConfig,
    ModelParams,
    PARAM_NAMES,
    backward_batch,
    batch_mean_loss,
    forward_batch,
    init_params,
)

CLASS_NAMES = ("bot", "fan", "genuine")


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 32
    epochs: int = 10
    seed: int = 0

    def validate(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


class AdamOptimizer:
    """Standard Adam with bias correction, one slot pair per parameter."""

    def __init__(self, cfg: TrainConfig):
        self.cfg = cfg
        self.step_count = 0
        self._m = {}
        self._v = {}

    def step(self, params: ModelParams, grads):
        self.step_count += 1
        c = self.cfg
        t = self.step_count
        for name in PARAM_NAMES:
            g = grads[name]
            if name not in self._m:
                self._m[name] = np.zeros_like(g)
                self._v[name] = np.zeros_like(g)
            self._m[name] = c.beta1 * self._m[name] + (1 - c.beta1) * g
            self._v[name] = c.beta2 * self._v[name] + (1 - c.beta2) * g * g
            m_hat = self._m[name] / (1 - c.beta1 ** t)
            v_hat = self._v[name] / (1 - c.beta2 ** t)
            params[name] = params[name] - c.learning_rate * m_hat / (np.sqrt(v_hat) + c.epsilon)


def one_hot(labels, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    out = np.zeros((len(labels), n_classes))
    out[np.arange(len(labels)), labels] = 1.0
    return out


def train(tokens, metadata, labels, model_cfg: ModelConfig,
          train_cfg: TrainConfig | None = None):
    """Fit the classifier; returns (params, per-epoch mean loss history).

    Weight init, epoch shuffling and dropout masks all derive from
    train_cfg.seed, so the result is bit-reproducible.
    """
    if train_cfg is None:
        train_cfg = TrainConfig()
    train_cfg.validate()
    tokens = np.asarray(tokens)
    metadata = np.asarray(metadata, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n = len(labels)
    if n == 0:
        raise ValueError("cannot train on an empty dataset")

    params = init_params(model_cfg, seed=train_cfg.seed)
    history: list[float] = []
    if train_cfg.epochs == 0:
        return params, history

    targets = one_hot(labels, model_cfg.n_classes)
    optimizer = AdamOptimizer(train_cfg)
    rng = np.random.default_rng(train_cfg.seed)
    for _ in range(train_cfg.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, train_cfg.batch_size):
            batch = order[start:start + train_cfg.batch_size]
            dropout_seed = int(rng.integers(0, 2 ** 31 - 1))
            probs, cache = forward_batch(
                params, model_cfg, tokens[batch], metadata[batch],
                train_mode=True, dropout_seed=dropout_seed,
            )
            epoch_losses.append(batch_mean_loss(probs, targets[batch]))
            grads = backward_batch(params, model_cfg, cache, targets[batch])
            optimizer.step(params, grads)
        history.append(float(np.mean(epoch_losses)))
    return params, history


def predict_batch(params: ModelParams, cfg: ModelConfig, tokens, metadata):
    """Argmax class indices (ties go to the lowest index). Inference is

    dropout-free and deterministic."""
    probs, _ = forward_batch(params, cfg, tokens, metadata, train_mode=False)
    return probs.argmax(axis=1), probs


def predict(params: ModelParams, cfg: ModelConfig, tokens, metadata,
            class_names=CLASS_NAMES) -> str:
    """Predicted label for a single example."""
    idx, _ = predict_batch(
        params, cfg, np.asarray(tokens)[None, :], np.asarray(metadata)[None, :]
    )
    return class_names[int(idx[0])]
