"""Dense feed-forward networks, optimizers and the training loop, in numpy."""

from .checkpoint import load_checkpoint, save_checkpoint
from .layers import BatchNorm, Layer, Linear, ReLU
from .model import (
    ArchitectureSpec,
    ForwardCache,
    MlpModel,
    backward,
    forward,
    init_model,
    predict,
    predict_logits,
)
from .optim import AdamState, OptimizerState, adam_step, sgd_step
from .train import EvalRecord, TrainConfig, TrainHistory, evaluate, train

__all__ = [
    "AdamState",
    "ArchitectureSpec",
    "BatchNorm",
    "EvalRecord",
    "ForwardCache",
    "Layer",
    "Linear",
    "MlpModel",
    "OptimizerState",
    "ReLU",
    "TrainConfig",
    "TrainHistory",
    "adam_step",
    "backward",
    "evaluate",
    "forward",
    "init_model",
    "load_checkpoint",
    "predict",
    "predict_logits",
    "save_checkpoint",
    "sgd_step",
]
