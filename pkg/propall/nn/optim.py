from dataclasses import dataclass, field

import numpy as np

from ..exceptions import DimensionMismatchError, ValidationError
from .model import MlpModel


@dataclass
class OptimizerState:
    """SGD with momentum and coupled weight decay.

    v <- momentum * v + (grad + weight_decay * param)
    param <- param - learning_rate * v
    """

    learning_rate: float
    momentum: float = 0.0
    weight_decay: float = 0.0
    velocity: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_model(cls, model: MlpModel, learning_rate: float, momentum: float = 0.0, weight_decay: float = 0.0) -> "OptimizerState":
        if learning_rate <= 0 or momentum < 0 or weight_decay < 0:
            raise ValidationError("learning rate must be positive, momentum and weight decay non-negative")
        velocity = {name: np.zeros_like(p) for name, p in model.named_parameters()}
        return cls(learning_rate, momentum, weight_decay, velocity)


@dataclass
class AdamState:
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    step: int = 0
    first: dict[str, np.ndarray] = field(default_factory=dict)
    second: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_model(cls, model: MlpModel, learning_rate: float, weight_decay: float = 0.0) -> "AdamState":
        if learning_rate <= 0 or weight_decay < 0:
            raise ValidationError("learning rate must be positive, weight decay non-negative")
        first = {name: np.zeros_like(p) for name, p in model.named_parameters()}
        second = {name: np.zeros_like(p) for name, p in model.named_parameters()}
        return cls(learning_rate, weight_decay=weight_decay, first=first, second=second)


def _checked_grad(name: str, param: np.ndarray, grads: dict[str, np.ndarray], buffers: dict[str, np.ndarray]) -> np.ndarray:
    if name not in grads or name not in buffers:
        raise DimensionMismatchError(f"no gradient or optimizer buffer for parameter {name}")
    g = grads[name]
    if g.shape != param.shape or buffers[name].shape != param.shape:
        raise DimensionMismatchError(f"shape mismatch for {name}: param {param.shape}, grad {g.shape}")
    return g


def sgd_step(model: MlpModel, grads: dict[str, np.ndarray], opt_state: OptimizerState) -> None:
    for name, param in model.named_parameters():
        g = _checked_grad(name, param, grads, opt_state.velocity)
        if opt_state.weight_decay:
            g = g + opt_state.weight_decay * param
        v = opt_state.velocity[name]
        v *= opt_state.momentum
        v += g
        param -= opt_state.learning_rate * v
    model.generation += 1


def adam_step(model: MlpModel, grads: dict[str, np.ndarray], opt_state: AdamState) -> None:
    opt_state.step += 1
    t = opt_state.step
    correction1 = 1.0 - opt_state.beta1**t
    correction2 = 1.0 - opt_state.beta2**t
    for name, param in model.named_parameters():
        g = _checked_grad(name, param, grads, opt_state.first)
        if opt_state.weight_decay:
            g = g + opt_state.weight_decay * param
        m = opt_state.first[name]
        s = opt_state.second[name]
        m *= opt_state.beta1
        m += (1.0 - opt_state.beta1) * g
        s *= opt_state.beta2
        s += (1.0 - opt_state.beta2) * g * g
        param -= opt_state.learning_rate * (m / correction1) / (np.sqrt(s / correction2) + opt_state.eps)
    model.generation += 1
