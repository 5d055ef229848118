# -*- coding: utf-8 -*-
#
# Copyright 2024 ProPaLL Developers
#
# Licensed under the Apache License, Version 2.0, <LICENSE-APACHE or
# http://apache.org/licenses/LICENSE-2.0> or the MIT license <LICENSE-MIT or
# http://opensource.org/licenses/MIT>, at your option. This file may not be
# copied, modified, or distributed except according to those terms.

"""Slow reference implementations and the suites that check the kernels against them.

Nothing here is used on the training path. The enumeration oracle is
exponential in k and the compensated cost is scalar Python.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import loss
from .exceptions import DimensionMismatchError, EmptyCandidateSetError, OracleSuiteFailure, ValidationError
from .loss import CandidateSet, StableConstants

logger = logging.getLogger(__name__)

MAX_ENUMERATION_CLASSES = 24
_CHUNK_BITS = 16


@dataclass(frozen=True)
class BinaryOutcome:
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValidationError("outcome bits must be 0 or 1")

    def in_event(self, S: CandidateSet) -> bool:
        """Membership in the candidate event: a 1 inside S and only 0s outside."""
        if len(self.bits) != S.num_classes:
            raise DimensionMismatchError("outcome length differs from k")
        inside = any(b for c, b in enumerate(self.bits) if c in S)
        outside = any(b for c, b in enumerate(self.bits) if c not in S)
        return inside and not outside


def outcome_probability(p, b: BinaryOutcome) -> float:
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (len(b.bits),):
        raise DimensionMismatchError(f"probability vector of length {p.size} for outcome of length {len(b.bits)}")
    bits = np.asarray(b.bits, dtype=bool)
    return float(np.prod(np.where(bits, p, 1.0 - p)))


def enumerate_event_probability(p, S: CandidateSet) -> float:
    """Sum P(b) over every b in {0,1}^k belonging to the candidate event."""
    p = np.asarray(p, dtype=np.float64)
    k = len(p)
    if k > MAX_ENUMERATION_CLASSES:
        raise ValidationError(f"enumeration limited to k <= {MAX_ENUMERATION_CLASSES}, got {k}")
    if k != S.num_classes:
        raise DimensionMismatchError(f"probability vector of length {k} for k={S.num_classes}")
    if len(S) == 0:
        raise EmptyCandidateSetError("candidate set is empty")

    mask = S.mask()
    shifts = np.arange(k, dtype=np.int64)
    total = 2**k
    chunk = 1 << _CHUNK_BITS
    partial = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = (idx[:, None] >> shifts) & 1 == 1
        member = bits[:, mask].any(axis=1) & ~bits[:, ~mask].any(axis=1)
        probs = np.where(bits, p, 1.0 - p).prod(axis=1)
        partial.append(float(probs[member].sum()))
    return math.fsum(partial)


def finite_difference_gradient(f: Callable[[np.ndarray], float], r, step: float = 1e-5) -> np.ndarray:
    """Central differences of a scalar function, one coordinate at a time."""
    if not step > 0:
        raise ValidationError("step must be positive")
    r = np.asarray(r, dtype=np.float64)
    grad = np.empty_like(r)
    for i in range(len(r)):
        up = r.copy()
        down = r.copy()
        up[i] += step
        down[i] -= step
        grad[i] = (f(up) - f(down)) / (2.0 * step)
    return grad


def _softplus(x: float) -> float:
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def high_precision_cost(r, S: CandidateSet) -> float:
    """-log P(S) without the threshold branch, summed with ``math.fsum``.

    The candidate mass h is carried as log h, rescaled by the largest
    candidate logit, so it never underflows; 1 - e^{-h} is formed with expm1.
    """
    r = [float(v) for v in np.asarray(r, dtype=np.float64)]
    if len(r) != S.num_classes:
        raise DimensionMismatchError(f"logit vector of length {len(r)} for k={S.num_classes}")
    if not all(math.isfinite(v) for v in r):
        raise ValidationError("logits must be finite")
    inside = [v for c, v in enumerate(r) if c in S]
    outside = [v for c, v in enumerate(r) if c not in S]

    part_ii = math.fsum(_softplus(v) for v in outside)

    h = math.fsum(_softplus(v) for v in inside)
    top = max(inside)
    if top > 0.0:
        log_h = math.log(h)
    else:
        # h = e^top * sum e^{r_i - top} * log1p(e^{r_i}) / e^{r_i}
        terms = []
        for v in inside:
            x = math.exp(v)
            g = math.log1p(x) / x if x > 0.0 else 1.0
            terms.append(math.exp(v - top) * g)
        log_h = top + math.log(math.fsum(terms))

    if h >= 1.0:
        part_i = -math.log(-math.expm1(-h))
    else:
        phi = -math.expm1(-h) / h if h > 0.0 else 1.0
        part_i = -(log_h + math.log(phi))
    return math.fsum([part_i, part_ii])


def _relative_error(a: np.ndarray, b: np.ndarray) -> float:
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / scale))


def _random_candidate_set(rng: np.random.Generator, k: int) -> CandidateSet:
    while True:
        mask = rng.random(k) < rng.uniform(0.1, 0.9)
        if mask.any():
            return CandidateSet.from_mask(mask)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    cases: int
    notes: list[str] = field(default_factory=list)

    def describe(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.name}: max error {self.max_error:.3e} (tol {self.tolerance:.0e}) over {self.cases} cases"
        for note in self.notes:
            text += f"\n       {note}"
        return text

    def raise_for_failure(self) -> "SuiteResult":
        if not self.passed:
            raise OracleSuiteFailure(self.describe())
        return self


def event_sum_suite(max_k: int = 12, trials: int = 500, seed: int = 0, tolerance: float = 1e-10) -> SuiteResult:
    """Closed-form event probability against brute-force enumeration, k = 2..max_k."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    cases = 0
    for k in range(2, max_k + 1):
        for _ in range(trials):
            p = rng.uniform(0.0, 1.0, size=k)
            S = _random_candidate_set(rng, k)
            err = abs(loss.propall_probability(p, S) - enumerate_event_probability(p, S))
            worst = max(worst, err)
            cases += 1
    logger.debug("event-sum suite: %d cases, worst %.3e", cases, worst)
    return SuiteResult("event-sum", worst < tolerance, worst, tolerance, cases)


def gradient_suite(
    trials: int = 1000,
    logit_range: float = 30.0,
    k: int = 6,
    seed: int = 0,
    step: float = 1e-5,
    tolerance: float = 1e-5,
) -> SuiteResult:
    """Analytic gradient against central differences of the compensated cost."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        r = rng.uniform(-logit_range, logit_range, size=k)
        S = _random_candidate_set(rng, k)
        fd = finite_difference_gradient(lambda v: high_precision_cost(v, S), r, step)
        worst = max(worst, _relative_error(loss.propall_grad_logits(r, S), fd))
    return SuiteResult(
        f"finite-difference gradient, logits in [-{logit_range:g},{logit_range:g}]",
        worst < tolerance,
        worst,
        tolerance,
        trials,
    )


def stable_branch_suite(
    tolerance: float = 1e-6,
    consts: StableConstants = loss.DEFAULT_CONSTANTS,
    stable: bool = True,
) -> SuiteResult:
    """Sweep the largest candidate logit across the branch threshold.

    ``stable=False`` swaps in the probability-space cost; it is the negative
    control and is expected to fail on the deep-negative spot checks.
    """
    if stable:
        def cost(r: np.ndarray, S: CandidateSet) -> float:
            return loss.propall_cost_logits(r, S, consts)
    else:
        def cost(r: np.ndarray, S: CandidateSet) -> float:
            return loss.naive_cost_logits(r, S)

    t = consts.branch_threshold
    S = CandidateSet.from_labels([0, 1, 2], 4)
    sweep = np.round(np.arange(t - 0.5, t + 0.5 + 5e-4, 1e-3), 10)
    worst = 0.0
    jump = 0.0
    prev_err = None
    for top in sweep:
        r = np.array([top, -40.0, -40.0, 0.5])
        err = cost(r, S) - high_precision_cost(r, S)
        if not math.isfinite(err):
            worst = math.inf
            continue
        worst = max(worst, abs(err))
        if prev_err is not None:
            jump = max(jump, abs(err - prev_err))
        prev_err = err

    notes = [f"largest step-to-step change of the error: {jump:.3e}"]
    spot_checks = [
        (np.array([-50.0, -50.0, 0.0]), CandidateSet.from_labels([0, 1], 3)),
        (np.array([-50.0, 3.0, -60.0]), CandidateSet.from_labels([0, 2], 3)),
        (np.array([-1.0e4, -1.0e4, 1.0e4]), CandidateSet.from_labels([0, 1], 3)),
    ]
    for r, sc in spot_checks:
        err = abs(cost(r, sc) - high_precision_cost(r, sc))
        if not math.isfinite(err):
            notes.append(f"non-finite cost at r={r.tolist()}")
            err = math.inf
        worst = max(worst, err)

    passed = worst < tolerance and jump < tolerance
    return SuiteResult("stable-branch continuity", passed, max(worst, jump), tolerance, len(sweep) + len(spot_checks), notes)


def singleton_suite(trials: int = 10_000, k: int = 10, seed: int = 0, tolerance: float = 1e-12) -> SuiteResult:
    """One-element candidate sets reduce to one-hot binary cross-entropy."""
    rng = np.random.default_rng(seed)
    R = rng.uniform(-40.0, 40.0, size=(trials, k))
    c = rng.integers(0, k, size=trials)
    M = np.arange(k)[None, :] == c[:, None]
    worst = float(np.max(np.abs(loss.propall_costs(R, M) - loss.bce_costs(R, c))))
    return SuiteResult("singleton reduction", worst < tolerance, worst, tolerance, trials)
