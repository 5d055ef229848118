import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np

from ..enums import ForwardMode
from ..exceptions import DimensionMismatchError, StaleCacheError, ValidationError
from ..gumbel import RandomSource
from ..helpers import parse_int_list
from .layers import BatchNorm, Layer, Linear, ReLU

PREDICT_BLOCK = 4096


@dataclass(frozen=True)
class ArchitectureSpec:
    """Layer widths from input to output, e.g. ``(784, 300, 301, 302, 303, 10)``.

    Hidden blocks are linear -> batch norm (optional) -> ReLU; the last
    linear layer emits the k logits. Two widths give a linear model.
    """

    widths: tuple[int, ...]
    batch_norm: bool = True

    def __post_init__(self) -> None:
        if len(self.widths) < 2:
            raise ValidationError("architecture needs an input and an output width")
        if any(w < 1 for w in self.widths):
            raise ValidationError(f"zero-width layer in {self.widths}")

    @classmethod
    def parse(cls, text: str, batch_norm: bool = True) -> "ArchitectureSpec":
        return cls(parse_int_list(text), batch_norm)

    @property
    def input_width(self) -> int:
        return self.widths[0]

    @property
    def num_classes(self) -> int:
        return self.widths[-1]

    def describe(self) -> str:
        return ",".join(str(w) for w in self.widths)


class MlpModel:
    arch: ArchitectureSpec
    layers: list[Layer]
    # bumped by every optimizer step; caches from older generations are stale
    generation: int

    def __init__(self, arch: ArchitectureSpec, layers: list[Layer]) -> None:
        self.arch = arch
        self.layers = layers
        self.generation = 0

    @property
    def num_classes(self) -> int:
        return self.arch.num_classes

    def named_parameters(self) -> Iterator[tuple[str, np.ndarray]]:
        for i, layer in enumerate(self.layers):
            for name, value in layer.parameters().items():
                yield f"{i}.{name}", value

    def named_buffers(self) -> Iterator[tuple[str, np.ndarray]]:
        for i, layer in enumerate(self.layers):
            for name, value in layer.buffers().items():
                yield f"{i}.{name}", value


@dataclass
class ForwardCache:
    generation: int
    mode: ForwardMode
    layer_caches: list[Any]


def build_layers(arch: ArchitectureSpec, linears: list[Linear]) -> list[Layer]:
    layers: list[Layer] = []
    for i, lin in enumerate(linears):
        layers.append(lin)
        if i < len(linears) - 1:
            if arch.batch_norm:
                layers.append(BatchNorm(lin.out_features))
            layers.append(ReLU())
    return layers


def init_model(arch: ArchitectureSpec, rng: RandomSource) -> MlpModel:
    """Uniform(+-sqrt(6 / fan_in)) weights, zero biases, identity batch norm."""
    gen = rng.generator
    linears = []
    for fan_in, fan_out in zip(arch.widths[:-1], arch.widths[1:]):
        bound = math.sqrt(6.0 / fan_in)
        linears.append(Linear(gen.uniform(-bound, bound, size=(fan_out, fan_in)), np.zeros(fan_out)))
    return MlpModel(arch, build_layers(arch, linears))


def forward(model: MlpModel, x_batch, mode: ForwardMode) -> tuple[np.ndarray, ForwardCache]:
    x = np.asarray(x_batch, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.arch.input_width:
        raise DimensionMismatchError(f"model expects inputs of width {model.arch.input_width}, got {x.shape}")
    caches = []
    for layer in model.layers:
        x, cache = layer.forward(x, mode)
        caches.append(cache)
    return x, ForwardCache(model.generation, mode, caches)


def backward(model: MlpModel, cache: ForwardCache, dlogits: np.ndarray) -> dict[str, np.ndarray]:
    """Parameter gradients, keyed like ``MlpModel.named_parameters``.

    ``dlogits`` is the gradient of the quantity being differentiated (the
    mean batch loss when it comes from ``loss.batch_cost``).
    """
    if cache.generation != model.generation or len(cache.layer_caches) != len(model.layers):
        raise StaleCacheError(f"cache from generation {cache.generation}, model is at {model.generation}")
    dout = np.asarray(dlogits, dtype=np.float64)
    grads: dict[str, np.ndarray] = {}
    for i in reversed(range(len(model.layers))):
        dout, layer_grads = model.layers[i].backward(cache.layer_caches[i], dout)
        for name, g in layer_grads.items():
            grads[f"{i}.{name}"] = g
    return grads


def predict_logits(model: MlpModel, x_batch, threads: int = 1, block: int = PREDICT_BLOCK) -> np.ndarray:
    """Eval-mode logits; blocks of rows are spread over ``threads`` workers."""
    x = np.asarray(x_batch, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.arch.input_width:
        raise DimensionMismatchError(f"model expects inputs of width {model.arch.input_width}, got {x.shape}")
    if x.shape[0] == 0:
        return np.zeros((0, model.num_classes))

    def run(start: int) -> np.ndarray:
        return forward(model, x[start:start + block], ForwardMode.eval)[0]

    starts = range(0, x.shape[0], block)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts, axis=0)


def predict(model: MlpModel, x_batch, threads: int = 1) -> np.ndarray:
    """Class with the greatest probability; ties go to the lowest index.

    sigmoid is monotone, so the argmax over logits is the argmax over
    probabilities.
    """
    return np.argmax(predict_logits(model, x_batch, threads), axis=1)
