# -*- coding: utf-8 -*-
#
# Copyright 2024 ProPaLL Developers
#
# Licensed under the Apache License, Version 2.0, <LICENSE-APACHE or
# http://apache.org/licenses/LICENSE-2.0> or the MIT license <LICENSE-MIT or
# http://opensource.org/licenses/MIT>, at your option. This file may not be
# copied, modified, or distributed except according to those terms.

import csv
import io
import json
import os
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .exceptions import DimensionMismatchError, ValidationError
from .helpers import write_bytes

if TYPE_CHECKING:
    from .nn.train import TrainHistory


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""

    counts: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def support(self) -> np.ndarray:
        return self.counts.sum(axis=1)


def confusion_matrix(preds, truths, num_classes: int) -> ConfusionMatrix:
    preds = np.asarray(preds, dtype=np.int64)
    truths = np.asarray(truths, dtype=np.int64)
    if preds.shape != truths.shape or preds.ndim != 1:
        raise DimensionMismatchError(f"{preds.size} predictions for {truths.size} labels")
    for arr in (preds, truths):
        if ((arr < 0) | (arr >= num_classes)).any():
            raise ValidationError(f"class index outside 0..{num_classes - 1}")
    counts = np.bincount(truths * num_classes + preds, minlength=num_classes * num_classes)
    return ConfusionMatrix(counts.reshape(num_classes, num_classes))


def accuracy(preds, truths) -> float:
    preds = np.asarray(preds)
    truths = np.asarray(truths)
    if preds.shape != truths.shape:
        raise DimensionMismatchError(f"{preds.size} predictions for {truths.size} labels")
    if preds.size == 0:
        raise ValidationError("accuracy of an empty evaluation")
    return float(np.mean(preds == truths))


def per_class_sensitivity(cm: ConfusionMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Recall per class and a flag telling which classes had any samples.

    Classes without support get sensitivity 0 and flag False.
    """
    support = cm.support()
    has_support = support > 0
    diag = np.diag(cm.counts).astype(np.float64)
    values = np.divide(diag, support, out=np.zeros_like(diag), where=has_support)
    return values, has_support


def aggregate_runs(accuracies: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (ddof=1); a single run has std 0."""
    acc = np.asarray(accuracies, dtype=np.float64)
    if acc.size == 0:
        raise ValidationError("no runs to aggregate")
    std = float(acc.std(ddof=1)) if acc.size > 1 else 0.0
    return float(acc.mean()), std


def format_mean_std(accuracies: Sequence[float]) -> str:
    """Table style ``mean (std)`` in percent."""
    mean, std = aggregate_runs(accuracies)
    return f"{100 * mean:.2f} ({100 * std:.2f})"


def write_history_jsonl(history: "TrainHistory", path: str | os.PathLike) -> None:
    """One JSON object per evaluation point.

    Keys: iteration, epoch, lambda, train_loss, train_accuracy,
    test_accuracy (null when unknown), sensitivity, support, confusion.
    """
    lines = [json.dumps(record.to_dict(), separators=(",", ":")) for record in history.records]
    write_bytes(path, ("\n".join(lines) + "\n" if lines else "").encode("utf-8"))


def write_history_csv(history: "TrainHistory", path: str | os.PathLike) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    k = len(history.records[0].sensitivity) if history.records else 0
    writer.writerow(
        ["iteration", "epoch", "train_loss", "train_accuracy", "test_accuracy", "lambda"]
        + [f"sens_{c}" for c in range(k)]
    )
    for r in history.records:
        writer.writerow(
            [
                r.iteration,
                r.epoch,
                repr(r.train_loss),
                "" if r.train_accuracy is None else repr(r.train_accuracy),
                "" if r.test_accuracy is None else repr(r.test_accuracy),
                repr(r.lam),
            ]
            + [repr(v) for v in r.sensitivity]
        )
    write_bytes(path, buf.getvalue().encode("utf-8"))
