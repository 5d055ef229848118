"""Candidate-set generators for partial- and complementary-label benchmarks.

Each generator takes the hidden true labels and returns an ``n x k`` boolean
candidate mask that always contains the true label. Randomness comes from a
private ``RandomSource`` built from ``seed``.
"""

from dataclasses import dataclass

import numpy as np

from ..enums import CorruptionMode
from ..exceptions import DimensionMismatchError, ValidationError
from ..gumbel import RandomSource


def _check_labels(labels, k: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1:
        raise DimensionMismatchError(f"labels must be a vector, got shape {labels.shape}")
    if k < 1 or ((labels < 0) | (labels >= k)).any():
        raise ValidationError(f"labels must lie in 0..{k - 1}")
    return labels


def _onehot(labels: np.ndarray, k: int) -> np.ndarray:
    mask = np.zeros((labels.shape[0], k), dtype=bool)
    mask[np.arange(labels.shape[0]), labels] = True
    return mask


def corrupt_uniform_fixed(labels, k: int, extra_count: int, seed: int) -> np.ndarray:
    """True label plus exactly ``extra_count`` distractors drawn without replacement."""
    labels = _check_labels(labels, k)
    if not 0 <= extra_count <= k - 1:
        raise ValidationError(f"extra_count must lie in 0..{k - 1}, got {extra_count}")
    n = labels.shape[0]
    mask = _onehot(labels, k)
    if extra_count == 0 or n == 0:
        return mask
    keys = RandomSource(seed).generator.random((n, k))
    # the true label sorts last, so the first extra_count keys are a uniform subset of the rest
    keys[np.arange(n), labels] = 2.0
    picked = np.argsort(keys, axis=1, kind="stable")[:, :extra_count]
    mask[np.arange(n)[:, None], picked] = True
    return mask


def corrupt_uniform_bernoulli(labels, k: int, q: float, seed: int) -> np.ndarray:
    """True label plus each other label independently with probability ``q``."""
    labels = _check_labels(labels, k)
    if not 0.0 <= q < 1.0:
        raise ValidationError(f"flip probability must lie in [0, 1), got {q}")
    flips = RandomSource(seed).generator.random((labels.shape[0], k)) < q
    return flips | _onehot(labels, k)


def corrupt_instance_dependent(labels, scores, seed: int) -> np.ndarray:
    """Per-instance flip probabilities clamp(scores[i][j], 0, 1) for j != true label."""
    labels = np.asarray(labels, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[0] != labels.shape[0]:
        raise DimensionMismatchError(f"score matrix {scores.shape} does not match {labels.shape[0]} labels")
    if (scores < 0).any() or not np.isfinite(scores).all():
        raise ValidationError("flip scores must be finite and non-negative")
    k = scores.shape[1]
    labels = _check_labels(labels, k)
    flips = RandomSource(seed).generator.random(scores.shape) < np.clip(scores, 0.0, 1.0)
    return flips | _onehot(labels, k)


def corrupt_complementary(labels, k: int, seed: int) -> np.ndarray:
    """Unbiased complementary labels: one wrong label drawn uniformly, S is everything else."""
    labels = _check_labels(labels, k)
    if k < 2:
        raise ValidationError("complementary labels need k >= 2")
    n = labels.shape[0]
    wrong = (labels + RandomSource(seed).generator.integers(1, k, size=n)) % k
    mask = np.ones((n, k), dtype=bool)
    mask[np.arange(n), wrong] = False
    return mask


@dataclass(frozen=True)
class CorruptionSpec:
    mode: CorruptionMode
    seed: int = 0
    extra_count: int | None = None
    flip_prob: float | None = None
    scores: np.ndarray | None = None

    def __post_init__(self) -> None:
        required = {
            CorruptionMode.fixed: self.extra_count,
            CorruptionMode.bernoulli: self.flip_prob,
            CorruptionMode.instance: self.scores,
        }
        if self.mode in required and required[self.mode] is None:
            raise ValidationError(f"corruption mode {self.mode.value} is missing its parameter")

    def describe(self) -> str:
        """Text recorded in the PLL-CSV header."""
        if self.mode is CorruptionMode.fixed:
            return f"fixed(extra={self.extra_count})"
        if self.mode is CorruptionMode.bernoulli:
            return f"bernoulli(q={self.flip_prob!r})"
        if self.mode is CorruptionMode.instance:
            return "instance(scores)"
        return self.mode.value


def corrupt(labels, k: int, spec: CorruptionSpec) -> np.ndarray:
    if spec.mode is CorruptionMode.fixed:
        return corrupt_uniform_fixed(labels, k, spec.extra_count, spec.seed)
    if spec.mode is CorruptionMode.bernoulli:
        return corrupt_uniform_bernoulli(labels, k, spec.flip_prob, spec.seed)
    if spec.mode is CorruptionMode.instance:
        masks = corrupt_instance_dependent(labels, spec.scores, spec.seed)
        if masks.shape[1] != k:
            raise DimensionMismatchError(f"score matrix has {masks.shape[1]} columns, expected k={k}")
        return masks
    if spec.mode is CorruptionMode.complementary:
        return corrupt_complementary(labels, k, spec.seed)
    return _onehot(_check_labels(labels, k), k)
