# -*- coding: utf-8 -*-
#
# Copyright 2024 ProPaLL Developers
#
# Licensed under the Apache License, Version 2.0, <LICENSE-APACHE or
# http://apache.org/licenses/LICENSE-2.0> or the MIT license <LICENSE-MIT or
# http://opensource.org/licenses/MIT>, at your option. This file may not be
# copied, modified, or distributed except according to those terms.

"""Candidate-set probability, cost and gradient kernels.

Every class i gets an independent Bernoulli output p_i = sigmoid(r_i). For a
candidate set S the training event is "at least one output inside S fires
and none outside S does", with probability

    P(S) = (1 - prod_{i in S} (1 - p_i)) * prod_{j not in S} (1 - p_j)

and the cost is -log P(S). For a one-element set this is the ordinary
binary cross-entropy against a one-hot target.

The batched kernels (``propall_costs``, ``propall_grads``, ``bce_costs``)
work on an ``n x k`` logit matrix and an ``n x k`` boolean candidate mask;
the single-sample functions are thin views onto them.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit, log_expit, logsumexp

from .exceptions import DimensionMismatchError, EmptyCandidateSetError, ValidationError


@dataclass(frozen=True)
class CandidateSet:
    """Label subset over ``num_classes`` classes, stored as a bitmask."""

    num_classes: int
    members: int

    def __post_init__(self) -> None:
        if self.num_classes < 1:
            raise ValidationError(f"num_classes must be positive, got {self.num_classes}")
        if self.members == 0:
            raise EmptyCandidateSetError("candidate set is empty")
        if self.members < 0 or self.members >> self.num_classes:
            raise ValidationError(
                f"candidate bitmask {self.members:#x} has labels outside 0..{self.num_classes - 1}"
            )

    @classmethod
    def from_labels(cls, labels: Iterable[int], num_classes: int) -> "CandidateSet":
        members = 0
        for c in labels:
            c = int(c)
            if not 0 <= c < num_classes:
                raise ValidationError(f"label {c} out of range for k={num_classes}")
            members |= 1 << c
        return cls(num_classes, members)

    @classmethod
    def from_mask(cls, mask: Sequence[bool] | np.ndarray) -> "CandidateSet":
        mask = np.asarray(mask, dtype=bool)
        return cls.from_labels(np.flatnonzero(mask), len(mask))

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(c for c in range(self.num_classes) if self.members >> c & 1)

    def mask(self) -> np.ndarray:
        return (self.members >> np.arange(self.num_classes)) & 1 == 1

    def issubset(self, other: "CandidateSet") -> bool:
        return self.num_classes == other.num_classes and self.members & ~other.members == 0

    def __len__(self) -> int:
        return self.members.bit_count()

    def __contains__(self, c: object) -> bool:
        return isinstance(c, (int, np.integer)) and 0 <= c < self.num_classes and bool(self.members >> int(c) & 1)


@dataclass(frozen=True)
class StableConstants:
    """Constants of the two-branch candidate term.

    ``min_finite`` masks non-candidates inside a LogSumExp (exp of it is 0);
    when the largest candidate logit is at or below ``branch_threshold`` the
    LogSumExp branch is used.
    """

    min_finite: float = float(np.finfo(np.float64).min)
    branch_threshold: float = -10.0

    def __post_init__(self) -> None:
        if not self.branch_threshold < 0:
            raise ValidationError("branch_threshold must be negative")
        if np.exp(self.min_finite) != 0.0:
            raise ValidationError("exp(min_finite) must underflow to 0")


DEFAULT_CONSTANTS = StableConstants()


def sigmoid(r):
    """Saturation-safe logistic function."""
    return expit(r)


def softplus(r):
    """LogSumExp(0, r) = log(1 + e^r) = -log(1 - sigmoid(r))."""
    return np.logaddexp(0.0, r)


def _logit_matrix(r) -> np.ndarray:
    R = np.asarray(r, dtype=np.float64)
    if R.ndim == 1:
        R = R[None, :]
    if R.ndim != 2:
        raise DimensionMismatchError(f"logits must be a vector or matrix, got shape {R.shape}")
    if not np.isfinite(R).all():
        raise ValidationError("logits must be finite")
    return R


def candidate_masks(sets, num_classes: int | None = None) -> np.ndarray:
    """Boolean ``n x k`` matrix from a CandidateSet, a sequence of them or a mask array."""
    if isinstance(sets, CandidateSet):
        M = sets.mask()[None, :]
    elif isinstance(sets, np.ndarray):
        M = sets.astype(bool, copy=False)
        if M.ndim == 1:
            M = M[None, :]
    else:
        sets = list(sets)
        if not sets:
            M = np.zeros((0, num_classes or 0), dtype=bool)
        else:
            widths = {s.num_classes for s in sets}
            if len(widths) != 1:
                raise DimensionMismatchError(f"candidate sets disagree on k: {sorted(widths)}")
            M = np.stack([s.mask() for s in sets])
    if M.ndim != 2:
        raise DimensionMismatchError(f"candidate mask must be 2-D, got shape {M.shape}")
    if num_classes is not None and M.shape[1] != num_classes:
        raise DimensionMismatchError(f"candidate sets are over k={M.shape[1]}, expected {num_classes}")
    if M.shape[0] and not M.any(axis=1).all():
        raise EmptyCandidateSetError("candidate set is empty")
    return M


def _batch(r, S) -> tuple[np.ndarray, np.ndarray]:
    R = _logit_matrix(r)
    M = candidate_masks(S, R.shape[1])
    if M.shape[0] != R.shape[0]:
        raise DimensionMismatchError(f"{R.shape[0]} logit rows but {M.shape[0]} candidate sets")
    return R, M


def _low_branch_correction(R: np.ndarray, M: np.ndarray, masked: np.ndarray, top: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Terms dropped when -log(1 - e^{-h}) is replaced by -LogSumExp of the candidates.

    Valid while every candidate logit is non-positive. The first term is
    log(h / sum e^{r_i}), the second log((1 - e^{-h}) / h); both vanish as the
    candidate logits go to -inf and neither underflows with h.
    """
    x = np.exp(np.minimum(R, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(M & (x > 0.0), np.log1p(x) / x, 1.0)
        w = np.exp(masked - top[:, None])
        ratio = (w * g).sum(axis=1) / w.sum(axis=1)
        safe_h = np.where(h > 0.0, h, 1.0)
        phi = np.where(h > 0.0, -np.expm1(-h) / safe_h, 1.0)
    return np.log(ratio) + np.log(phi)


def _log_candidate_mass(R: np.ndarray, M: np.ndarray, h: np.ndarray, consts: StableConstants) -> np.ndarray:
    """log h with h = sum_{i in S} LogSumExp(0, r_i), finite even when h underflows."""
    masked = np.where(M, R, consts.min_finite)
    top = masked.max(axis=1)
    x = np.exp(np.minimum(R, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(M & (x > 0.0), np.log1p(x) / x, 1.0)
        w = np.exp(masked - top[:, None])
        scaled = top + np.log((w * g).sum(axis=1))
        direct = np.log(h)
    return np.where(top > 0.0, direct, scaled)


def propall_costs(logits, candidates, consts: StableConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Per-row -log P(S) for an ``n x k`` logit matrix."""
    R, M = _batch(logits, candidates)
    sp = softplus(R)
    part_ii = np.where(M, 0.0, sp).sum(axis=1)
    h = np.where(M, sp, 0.0).sum(axis=1)

    masked = np.where(M, R, consts.min_finite)
    top = masked.max(axis=1)
    upper = top > consts.branch_threshold

    with np.errstate(divide="ignore"):
        part_i_upper = -np.log(-np.expm1(-h))
    part_i_lower = -logsumexp(masked, axis=1) - _low_branch_correction(R, M, masked, top, h)
    part_i = np.where(upper, part_i_upper, part_i_lower)
    return part_i + part_ii


def propall_grads(logits, candidates, consts: StableConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Per-row gradient of -log P(S) with respect to the logits.

    With Q = prod_{i in S}(1 - p_i) = e^{-h}, a candidate component is
    -p_i Q / (1 - Q) = -p_i / expm1(h) and a non-candidate component is p_j.
    The candidate part is evaluated as exp(log p_i - log expm1(h)).
    """
    R, M = _batch(logits, candidates)
    sp = softplus(R)
    h = np.where(M, sp, 0.0).sum(axis=1)
    log_h = _log_candidate_mass(R, M, h, consts)
    with np.errstate(divide="ignore", invalid="ignore"):
        safe_h = np.where(h > 0.0, h, 1.0)
        small = log_h + np.log(np.where(h > 0.0, np.expm1(np.minimum(h, 1.0)) / safe_h, 1.0))
        large = h + np.log(-np.expm1(-np.maximum(h, 1.0)))
    log_expm1_h = np.where(h > 1.0, large, small)
    # non-candidate entries may overflow here; np.where drops them
    with np.errstate(over="ignore"):
        inside = -np.exp(log_expit(R) - log_expm1_h[:, None])
    return np.where(M, inside, expit(R))


def bce_costs(logits, labels) -> np.ndarray:
    """Per-row one-hot binary cross-entropy, entirely in log domain."""
    R = _logit_matrix(logits)
    c = np.atleast_1d(np.asarray(labels))
    if c.shape != (R.shape[0],):
        raise DimensionMismatchError(f"{R.shape[0]} logit rows but {c.size} labels")
    if ((c < 0) | (c >= R.shape[1])).any():
        raise ValidationError(f"class index out of range for k={R.shape[1]}")
    onehot = np.arange(R.shape[1])[None, :] == c[:, None]
    rest = np.where(onehot, 0.0, softplus(R)).sum(axis=1)
    return softplus(-R[np.arange(R.shape[0]), c]) + rest


def bce_cost_logits(r, c: int) -> float:
    return float(bce_costs(r, [c])[0])


def propall_probability(p, S: CandidateSet) -> float:
    """P(S) in probability space."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or len(p) != S.num_classes:
        raise DimensionMismatchError(f"probability vector of length {p.size} for k={S.num_classes}")
    mask = S.mask()
    return float((1.0 - np.prod(1.0 - p[mask])) * np.prod(1.0 - p[~mask]))


def propall_cost_logits(r, S: CandidateSet, consts: StableConstants = DEFAULT_CONSTANTS) -> float:
    return float(propall_costs(r, S, consts)[0])


def propall_grad_logits(r, S: CandidateSet, consts: StableConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    return propall_grads(r, S, consts)[0]


def naive_cost_logits(r, S: CandidateSet) -> float:
    """-log P(S) through probability space, without the stable rewrite.

    Underflows to +inf once every candidate probability is below ~1e-16.
    """
    p = sigmoid(_logit_matrix(r)[0])
    with np.errstate(divide="ignore"):
        return float(-np.log(propall_probability(p, S)))


def batch_cost(logits, candidates, consts: StableConstants = DEFAULT_CONSTANTS) -> tuple[float, np.ndarray]:
    """Mean cost over the batch and its gradient (rows already scaled by 1/n)."""
    R, M = _batch(logits, candidates)
    n = R.shape[0]
    if n == 0:
        raise DimensionMismatchError("empty batch")
    costs = propall_costs(R, M, consts)
    grads = propall_grads(R, M, consts)
    return float(costs.mean()), grads / n
