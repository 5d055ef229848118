"""PLL-CSV, the plain-text interchange format for partial-label datasets.

    # pll-csv v1 k=<K> corruption=<desc>
    <true_label>;<cand>|<cand>|...;<f_1>,<f_2>,...,<f_d>

UTF-8, LF line endings. ``true_label`` is ``?`` when unknown. Candidates are
written in ascending order and features with the shortest decimal text that
reads back to the same double, so save -> load -> save is byte-identical.
"""

import logging
import os
import re

import numpy as np

from ..exceptions import EmptyCandidateSetError, FormatError, ValidationError
from ..helpers import format_float, read_bytes, write_bytes
from .base import UNKNOWN_LABEL, PllDataset

logger = logging.getLogger(__name__)

HEADER_RE = re.compile(r"^# pll-csv v1 k=(\d+) corruption=(.*)$")


def dumps_pll_csv(dataset: PllDataset) -> str:
    lines = [f"# pll-csv v1 k={dataset.num_classes} corruption={dataset.corruption}"]
    labels = dataset.true_labels
    for i in range(len(dataset)):
        true = "?" if labels is None or labels[i] == UNKNOWN_LABEL else str(int(labels[i]))
        cands = "|".join(str(int(c)) for c in np.flatnonzero(dataset.candidates[i]))
        feats = ",".join(format_float(v) for v in dataset.features[i])
        lines.append(f"{true};{cands};{feats}")
    return "\n".join(lines) + "\n"


def loads_pll_csv(text: str) -> PllDataset:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("PLL-CSV file is empty")
    m = HEADER_RE.match(lines[0])
    if m is None:
        raise FormatError(f"bad PLL-CSV header: {lines[0]!r}")
    k = int(m.group(1))
    corruption = m.group(2)
    if k < 1:
        raise FormatError("PLL-CSV header declares k=0")

    n = len(lines) - 1
    labels = np.full(n, UNKNOWN_LABEL, dtype=np.int64)
    candidates = np.zeros((n, k), dtype=bool)
    rows: list[list[float]] = []
    width = None
    for i, line in enumerate(lines[1:]):
        lineno = i + 2
        fields = line.split(";")
        if len(fields) != 3:
            raise FormatError(f"line {lineno}: expected 3 ';'-separated fields, got {len(fields)}")
        true_text, cand_text, feat_text = fields
        if not cand_text:
            raise EmptyCandidateSetError(f"line {lineno}: empty candidate list")
        try:
            cands = [int(c) for c in cand_text.split("|")]
            feats = [float(v) for v in feat_text.split(",")] if feat_text else []
            if true_text != "?":
                labels[i] = int(true_text)
        except ValueError as e:
            raise FormatError(f"line {lineno}: {e}") from e
        if any(not 0 <= c < k for c in cands):
            raise ValidationError(f"line {lineno}: candidate index outside 0..{k - 1}")
        if width is None:
            width = len(feats)
        elif len(feats) != width:
            raise FormatError(f"line {lineno}: ragged row with {len(feats)} features, expected {width}")
        candidates[i, cands] = True
        if labels[i] != UNKNOWN_LABEL and not 0 <= labels[i] < k:
            raise ValidationError(f"line {lineno}: true label {labels[i]} outside 0..{k - 1}")
        if labels[i] != UNKNOWN_LABEL and not candidates[i, labels[i]]:
            raise ValidationError(f"line {lineno}: true label {labels[i]} is not among its candidates")
        rows.append(feats)

    features = np.asarray(rows, dtype=np.float64).reshape(n, width or 0)
    true_labels = None if (labels == UNKNOWN_LABEL).all() else labels
    return PllDataset(features, candidates, k, true_labels=true_labels, corruption=corruption)


def load_pll_csv(path: str | os.PathLike) -> PllDataset:
    dataset = loads_pll_csv(read_bytes(path).decode("utf-8"))
    logger.debug("loaded %s: n=%d d=%d k=%d", path, len(dataset), dataset.dim, dataset.num_classes)
    return dataset


def save_pll_csv(dataset: PllDataset, path: str | os.PathLike) -> None:
    write_bytes(path, dumps_pll_csv(dataset).encode("utf-8"))
