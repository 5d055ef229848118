# -*- coding: utf-8 -*-
#
# Copyright 2024 ProPaLL Developers
#
# Licensed under the Apache License, Version 2.0, <LICENSE-APACHE or
# http://apache.org/licenses/LICENSE-2.0> or the MIT license <LICENSE-MIT or
# http://opensource.org/licenses/MIT>, at your option. This file may not be
# copied, modified, or distributed except according to those terms.
#

"""Probabilistic partial label learning."""

import pathlib

from . import datasets, gumbel, loss, metrics, nn, oracles

__version__ = open(pathlib.Path(__file__).parent / "VERSION").read().strip()


del pathlib
__all__ = [
    "datasets",
    "enums",
    "exceptions",
    "gumbel",
    "helpers",
    "loss",
    "metrics",
    "nn",
    "oracles",
]
