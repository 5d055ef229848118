from abc import abstractmethod
from typing import Any, Protocol

import numpy as np

from ..enums import ForwardMode
from ..exceptions import DimensionMismatchError, ValidationError


# Base class
# Every layer returns its own cache from forward and consumes it in backward,
# so a layer object carries parameters and buffers only.
class Layer(Protocol):
    kind: str

    def parameters(self) -> dict[str, np.ndarray]:
        """Trainable arrays, updated in place by the optimizers."""
        return {}

    def buffers(self) -> dict[str, np.ndarray]:
        """Non-trainable state that still belongs in a checkpoint."""
        return {}

    @abstractmethod
    def forward(self, x: np.ndarray, mode: ForwardMode) -> tuple[np.ndarray, Any]:
        pass

    @abstractmethod
    def backward(self, cache: Any, dout: np.ndarray) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        pass

    def config(self) -> dict[str, Any]:
        return {}


class Linear(Layer):
    kind = "linear"
    weight: np.ndarray
    bias: np.ndarray

    def __init__(self, weight: np.ndarray, bias: np.ndarray) -> None:
        if weight.ndim != 2 or bias.shape != (weight.shape[0],):
            raise DimensionMismatchError(f"weight {weight.shape} and bias {bias.shape} do not fit")
        self.weight = weight
        self.bias = bias

    @property
    def in_features(self) -> int:
        return self.weight.shape[1]

    @property
    def out_features(self) -> int:
        return self.weight.shape[0]

    def parameters(self) -> dict[str, np.ndarray]:
        return {"weight": self.weight, "bias": self.bias}

    def forward(self, x: np.ndarray, mode: ForwardMode) -> tuple[np.ndarray, Any]:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise DimensionMismatchError(f"linear layer expects width {self.in_features}, got input {x.shape}")
        return x @ self.weight.T + self.bias, x

    def backward(self, cache: Any, dout: np.ndarray) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        x = cache
        grads = {"weight": dout.T @ x, "bias": dout.sum(axis=0)}
        return dout @ self.weight, grads


class BatchNorm(Layer):
    """Per-feature batch normalisation with exponential running statistics."""

    kind = "batch_norm"

    def __init__(
        self,
        num_features: int,
        eps: float = 1e-5,
        momentum: float = 0.1,
    ) -> None:
        self.scale = np.ones(num_features)
        self.shift = np.zeros(num_features)
        self.running_mean = np.zeros(num_features)
        self.running_var = np.ones(num_features)
        self.eps = eps
        self.momentum = momentum

    def parameters(self) -> dict[str, np.ndarray]:
        return {"scale": self.scale, "shift": self.shift}

    def buffers(self) -> dict[str, np.ndarray]:
        return {"running_mean": self.running_mean, "running_var": self.running_var}

    def config(self) -> dict[str, Any]:
        return {"eps": self.eps, "momentum": self.momentum}

    def forward(self, x: np.ndarray, mode: ForwardMode) -> tuple[np.ndarray, Any]:
        if x.ndim != 2 or x.shape[1] != self.scale.shape[0]:
            raise DimensionMismatchError(f"batch norm expects width {self.scale.shape[0]}, got input {x.shape}")
        if mode is ForwardMode.train:
            n = x.shape[0]
            if n < 2:
                raise ValidationError("batch normalisation needs at least 2 samples in train mode")
            mean = x.mean(axis=0)
            var = x.var(axis=0)
            # running variance tracks the unbiased estimate
            self.running_mean *= 1.0 - self.momentum
            self.running_mean += self.momentum * mean
            self.running_var *= 1.0 - self.momentum
            self.running_var += self.momentum * var * n / (n - 1)
        else:
            mean = self.running_mean
            var = self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean) * inv_std
        return self.scale * xhat + self.shift, (mode, xhat, inv_std)

    def backward(self, cache: Any, dout: np.ndarray) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        mode, xhat, inv_std = cache
        grads = {"scale": (dout * xhat).sum(axis=0), "shift": dout.sum(axis=0)}
        dxhat = dout * self.scale
        if mode is ForwardMode.eval:
            return dxhat * inv_std, grads
        n = dout.shape[0]
        dx = inv_std / n * (n * dxhat - dxhat.sum(axis=0) - xhat * (dxhat * xhat).sum(axis=0))
        return dx, grads


class ReLU(Layer):
    kind = "relu"

    def forward(self, x: np.ndarray, mode: ForwardMode) -> tuple[np.ndarray, Any]:
        active = x > 0.0
        return np.where(active, x, 0.0), active

    def backward(self, cache: Any, dout: np.ndarray) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        return np.where(cache, dout, 0.0), {}
