# -*- coding: utf-8 -*-
#
# Copyright 2024 ProPaLL Developers
#
# Licensed under the Apache License, Version 2.0, <LICENSE-APACHE or
# http://apache.org/licenses/LICENSE-2.0> or the MIT license <LICENSE-MIT or
# http://opensource.org/licenses/MIT>, at your option. This file may not be
# copied, modified, or distributed except according to those terms.

from enum import Enum


class ForwardMode(Enum):
    train = "train"
    eval = "eval"


class CorruptionMode(Enum):
    none = "none"
    fixed = "fixed"
    bernoulli = "bernoulli"
    instance = "instance"
    complementary = "complementary"


class NormalizeMode(Enum):
    none = "none"
    minmax = "minmax"
    zscore = "zscore"


class OptimizerKind(Enum):
    sgd = "sgd"
    adam = "adam"


class NoiseConstruction(Enum):
    # one Logistic(0, 1) draw, distributed exactly as U - V
    logistic = "logistic"
    gumbel_pair = "gumbel_pair"
