# -*- coding: utf-8 -*-
#
# Copyright 2024 ProPaLL Developers
#
# Licensed under the Apache License, Version 2.0, <LICENSE-APACHE or
# http://apache.org/licenses/LICENSE-2.0> or the MIT license <LICENSE-MIT or
# http://opensource.org/licenses/MIT>, at your option. This file may not be
# copied, modified, or distributed except according to those terms.


class ProPaLLError(Exception):
    """Base class, the CLI maps every subclass to exit code 3."""

    pass


class DimensionMismatchError(ProPaLLError, ValueError):
    """Logits, candidate sets, labels or parameters disagree in shape."""

    pass


class EmptyCandidateSetError(ProPaLLError, ValueError):
    """A candidate set has no members.

    The candidate event is then empty, its probability is zero and the
    cost is infinite, so we refuse it instead of returning a number.
    """

    pass


class ValidationError(ProPaLLError, ValueError):
    """An argument is out of range or a dataset breaks the PLL invariant."""

    pass


class FormatError(ProPaLLError):
    """Malformed IDX, PLL-CSV, score matrix or checkpoint file."""

    pass


class StaleCacheError(ProPaLLError):
    """Backward pass called with a cache from before the last update."""

    pass


class OracleSuiteFailure(ProPaLLError):
    """A verification suite exceeded its tolerance."""

    pass
