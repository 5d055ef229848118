import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .. import gumbel, loss, metrics
from ..datasets import PllDataset
from ..enums import ForwardMode, NoiseConstruction, OptimizerKind
from ..exceptions import DimensionMismatchError, ValidationError
from ..gumbel import NoiseSchedule, RandomSource
from .model import ArchitectureSpec, MlpModel, backward, forward, init_model, predict
from .optim import AdamState, OptimizerState, adam_step, sgd_step

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """Run hyperparameters; defaults follow the 5-layer MLP recipe for uniform corruption."""

    architecture: ArchitectureSpec
    epochs: int = 500
    batch_size: int = 256
    learning_rate: float = 0.05
    momentum: float = 0.9
    weight_decay: float = 1e-6
    plateau_fraction: float = 0.8
    peak_lambda: float = 1.0
    noise_construction: NoiseConstruction = NoiseConstruction.logistic
    optimizer: OptimizerKind = OptimizerKind.sgd
    seed: int = 0
    eval_every: int = 100
    threads: int = 1

    def __post_init__(self) -> None:
        for name in ("epochs", "batch_size", "eval_every", "threads"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be at least 1")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be positive")
        if self.momentum < 0 or self.weight_decay < 0 or self.peak_lambda < 0:
            raise ValidationError("momentum, weight_decay and peak_lambda must be non-negative")
        if not 0.0 <= self.plateau_fraction <= 1.0:
            raise ValidationError("plateau_fraction must lie in [0, 1]")

    def to_dict(self) -> dict[str, Any]:
        doc = asdict(self)
        doc["architecture"] = {"widths": list(self.architecture.widths), "batch_norm": self.architecture.batch_norm}
        doc["noise_construction"] = self.noise_construction.value
        doc["optimizer"] = self.optimizer.value
        return doc


@dataclass
class EvalRecord:
    iteration: int
    epoch: int
    lam: float
    train_loss: float
    train_accuracy: float | None
    test_accuracy: float | None
    sensitivity: list[float]
    support: list[bool]
    confusion: list[list[int]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "iteration": self.iteration,
            "epoch": self.epoch,
            "lambda": self.lam,
            "train_loss": self.train_loss,
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
            "sensitivity": self.sensitivity,
            "support": self.support,
            "confusion": self.confusion,
        }


@dataclass
class TrainHistory:
    records: list[EvalRecord] = field(default_factory=list)

    def append(self, record: EvalRecord) -> None:
        if self.records and record.iteration <= self.records[-1].iteration:
            raise ValidationError("history iterations must be strictly increasing")
        self.records.append(record)

    @property
    def last(self) -> EvalRecord | None:
        return self.records[-1] if self.records else None


def batch_bounds(n: int, batch_size: int, batch_norm: bool) -> list[tuple[int, int]]:
    """Mini-batch slices of a shuffled epoch; the trailing partial batch is kept.

    A trailing batch of one sample cannot be batch-normalised, so with batch
    norm it is merged into the batch before it.
    """
    bounds = [(s, min(s + batch_size, n)) for s in range(0, n, batch_size)]
    if batch_norm and len(bounds) > 1 and bounds[-1][1] - bounds[-1][0] == 1:
        last = bounds.pop()
        bounds[-1] = (bounds[-1][0], last[1])
    return bounds


def evaluate(model: MlpModel, dataset: PllDataset, threads: int = 1) -> tuple[float, metrics.ConfusionMatrix]:
    if not dataset.has_true_labels:
        raise ValidationError("evaluation needs known true labels for every row")
    preds = predict(model, dataset.features, threads)
    cm = metrics.confusion_matrix(preds, dataset.true_labels, model.num_classes)
    return metrics.accuracy(preds, dataset.true_labels), cm


def check_compatible(arch: ArchitectureSpec, dataset: PllDataset, what: str) -> None:
    if dataset.num_classes != arch.num_classes:
        raise DimensionMismatchError(f"{what} has k={dataset.num_classes}, architecture outputs {arch.num_classes}")
    if dataset.dim != arch.input_width:
        raise DimensionMismatchError(f"{what} has {dataset.dim} features, architecture expects {arch.input_width}")


def train(dataset: PllDataset, config: TrainConfig, test_set: PllDataset | None = None) -> tuple[MlpModel, TrainHistory]:
    """Minimise the mean candidate-set cost with noisy logits.

    Three independent streams are spawned from ``config.seed`` for
    initialisation, shuffling and logit noise, so switching the noise off
    leaves the other two untouched. Fully deterministic for a fixed seed on
    a single thread.
    """
    if len(dataset) == 0:
        raise ValidationError("cannot train on an empty dataset")
    arch = config.architecture
    check_compatible(arch, dataset, "training set")
    if test_set is not None:
        check_compatible(arch, test_set, "test set")
        if not test_set.has_true_labels:
            raise ValidationError("test set needs known true labels")

    init_rng, shuffle_rng, noise_rng = RandomSource(config.seed).spawn(3)
    model = init_model(arch, init_rng)
    if config.optimizer is OptimizerKind.adam:
        opt: OptimizerState | AdamState = AdamState.for_model(model, config.learning_rate, config.weight_decay)
        step_fn = adam_step
    else:
        opt = OptimizerState.for_model(model, config.learning_rate, config.momentum, config.weight_decay)
        step_fn = sgd_step

    n = len(dataset)
    bounds = batch_bounds(n, config.batch_size, arch.batch_norm)
    total_steps = config.epochs * len(bounds)
    schedule = NoiseSchedule(total_steps, config.plateau_fraction, config.peak_lambda)
    eval_split = test_set if test_set is not None else dataset if dataset.has_true_labels else None
    logger.info("training on n=%d for %d epochs, %d steps of batch %d", n, config.epochs, total_steps, config.batch_size)

    history = TrainHistory()
    step = 0
    window: list[float] = []
    for epoch in range(config.epochs):
        order = shuffle_rng.generator.permutation(n)
        for start, stop in bounds:
            rows = order[start:stop]
            logits, cache = forward(model, dataset.features[rows], ForwardMode.train)
            lam = gumbel.lambda_at(schedule, step)
            noisy = gumbel.perturb_logits(logits, lam, noise_rng, config.noise_construction)
            batch_loss, dlogits = loss.batch_cost(noisy, dataset.candidates[rows])
            grads = backward(model, cache, dlogits)
            step_fn(model, grads, opt)
            step += 1
            window.append(batch_loss)
            if step % config.eval_every == 0 or step == total_steps:
                history.append(_record(model, dataset, test_set, eval_split, step, epoch, lam, window, config.threads))
                window = []
    return model, history


def _record(
    model: MlpModel,
    dataset: PllDataset,
    test_set: PllDataset | None,
    eval_split: PllDataset | None,
    step: int,
    epoch: int,
    lam: float,
    window: list[float],
    threads: int,
) -> EvalRecord:
    train_acc = evaluate(model, dataset, threads)[0] if dataset.has_true_labels else None
    test_acc = None
    k = model.num_classes
    if eval_split is not None:
        acc, cm = evaluate(model, eval_split, threads)
        if test_set is not None:
            test_acc = acc
    else:
        cm = metrics.ConfusionMatrix(np.zeros((k, k), dtype=np.int64))
    sens, support = metrics.per_class_sensitivity(cm)
    record = EvalRecord(
        iteration=step,
        epoch=epoch + 1,
        lam=lam,
        train_loss=math.fsum(window) / len(window),
        train_accuracy=train_acc,
        test_accuracy=test_acc,
        sensitivity=sens.tolist(),
        support=support.tolist(),
        confusion=cm.counts.tolist(),
    )
    logger.info(
        "iter %d epoch %d loss %.5f train acc %s test acc %s",
        step,
        epoch + 1,
        record.train_loss,
        "-" if train_acc is None else f"{train_acc:.4f}",
        "-" if test_acc is None else f"{test_acc:.4f}",
    )
    return record
