# -*- coding: utf-8 -*-
#
# Copyright 2024 ProPaLL Developers
#
# Licensed under the Apache License, Version 2.0, <LICENSE-APACHE or
# http://apache.org/licenses/LICENSE-2.0> or the MIT license <LICENSE-MIT or
# http://opensource.org/licenses/MIT>, at your option. This file may not be
# copied, modified, or distributed except according to those terms.

"""Gumbel-difference logit noise and its annealing schedule.

Adding Gumbel noise to the two softmax logits of a binary problem is the
same as adding U - V (U, V independent standard Gumbels) to the single
sigmoid logit. With k independent sigmoid outputs, every logit gets its own
draw, scaled by a lambda that stays at its peak for most of training and
then falls linearly to zero.
"""

from dataclasses import dataclass

import numpy as np

from .enums import NoiseConstruction
from .exceptions import ValidationError


@dataclass(frozen=True)
class NoiseSchedule:
    total_steps: int
    plateau_fraction: float = 0.8
    peak_lambda: float = 1.0

    def __post_init__(self) -> None:
        if self.total_steps < 1:
            raise ValidationError(f"total_steps must be positive, got {self.total_steps}")
        if not 0.0 <= self.plateau_fraction <= 1.0:
            raise ValidationError(f"plateau_fraction must lie in [0, 1], got {self.plateau_fraction}")
        if self.peak_lambda < 0.0:
            raise ValidationError(f"peak_lambda must be non-negative, got {self.peak_lambda}")


def lambda_at(sched: NoiseSchedule, step: int) -> float:
    if not 0 <= step <= sched.total_steps:
        raise ValidationError(f"step {step} outside 0..{sched.total_steps}")
    plateau_end = sched.plateau_fraction * sched.total_steps
    if step <= plateau_end:
        return sched.peak_lambda
    return sched.peak_lambda * (sched.total_steps - step) / (sched.total_steps - plateau_end)


class RandomSource:
    """Seeded PCG64 stream; one owner, never shared between threads."""

    algorithm = "PCG64"
    seed: int
    generator: np.random.Generator

    def __init__(self, seed: int | np.random.SeedSequence) -> None:
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
            self.seed = int(seed.entropy)
        else:
            self.seed = int(seed)
            if not 0 <= self.seed < 2**64:
                raise ValidationError(f"seed must lie in [0, 2**64), got {self.seed}")
            self._seq = np.random.SeedSequence(self.seed)
        self.generator = np.random.Generator(np.random.PCG64(self._seq))

    def spawn(self, n: int) -> list["RandomSource"]:
        """Independent child streams, reproducible from the parent seed."""
        return [RandomSource(child) for child in self._seq.spawn(n)]

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, algorithm={self.algorithm!r})"


def gumbel_difference(
    rng: RandomSource,
    size: int | tuple[int, ...] | None = None,
    construction: NoiseConstruction = NoiseConstruction.logistic,
):
    """Draws of U - V with U, V independent standard Gumbels.

    The difference is exactly Logistic(0, 1), so the default draws that
    directly; ``gumbel_pair`` draws both Gumbels and subtracts.
    """
    gen = rng.generator
    if construction is NoiseConstruction.gumbel_pair:
        return gen.gumbel(0.0, 1.0, size) - gen.gumbel(0.0, 1.0, size)
    return gen.logistic(0.0, 1.0, size)


def gumbel_difference_sample(rng: RandomSource, construction: NoiseConstruction = NoiseConstruction.logistic) -> float:
    return float(gumbel_difference(rng, None, construction))


def perturb_logits(
    r,
    lam: float,
    rng: RandomSource,
    construction: NoiseConstruction = NoiseConstruction.logistic,
) -> np.ndarray:
    """r + lam * (U - V), one independent draw per entry; ``r`` is not modified."""
    if lam < 0.0:
        raise ValidationError(f"lambda must be non-negative, got {lam}")
    r = np.asarray(r, dtype=np.float64)
    if lam == 0.0:
        return r.copy()
    return r + lam * gumbel_difference(rng, r.shape, construction)
