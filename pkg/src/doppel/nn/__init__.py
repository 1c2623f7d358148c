"""From-scratch neural classifier: embedding -> conv -> dropout -> pool ->
LSTM -> dense text branch, dense metadata branch, fused softmax head."""

from .model import (
    ModelConfig,
    ModelParams,
    PARAM_NAMES,
    init_params,
    forward,
    forward_batch,
    backward_batch,
    cross_entropy,
    batch_mean_loss,
)
from .train import TrainConfig, AdamOptimizer, train, predict, predict_batch
from .container import save_model, load_model

__all__ = [
    "ModelConfig", "ModelParams", "PARAM_NAMES", "init_params",
    "forward", "forward_batch", "backward_batch", "cross_entropy",
    "batch_mean_loss", "TrainConfig", "AdamOptimizer", "train",
    "predict", "predict_batch", "save_model", "load_model",
]
