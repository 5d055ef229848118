"""Desk-scale MNIST runs. Slow; need PROPALL_MNIST_DIR with the four IDX files."""

import os

import pytest

from propall.datasets import (
    CorruptionSpec,
    FeatureScaler,
    average_candidate_count,
    corrupt,
    load_idx_dataset,
    subsample,
)
from propall.enums import CorruptionMode, NormalizeMode
from propall.nn import ArchitectureSpec, TrainConfig, train

pytestmark = pytest.mark.slow

MLP = ArchitectureSpec((784, 300, 301, 302, 303, 10), batch_norm=True)


def find(directory: str, stem: str) -> str:
    for name in (stem, stem + ".gz"):
        path = os.path.join(directory, name)
        if os.path.exists(path):
            return path
    pytest.skip(f"{stem} not found in {directory}")


def mnist(directory: str):
    train_set = load_idx_dataset(
        find(directory, "train-images-idx3-ubyte"), find(directory, "train-labels-idx1-ubyte"), num_classes=10
    )
    test_set = load_idx_dataset(
        find(directory, "t10k-images-idx3-ubyte"), find(directory, "t10k-labels-idx1-ubyte"), num_classes=10
    )
    scaler = FeatureScaler.fit(train_set.features, NormalizeMode.minmax)
    return scaler.apply(train_set), scaler.apply(test_set)


def with_extra(dataset, extra: int, seed: int = 1):
    spec = CorruptionSpec(CorruptionMode.fixed, seed=seed, extra_count=extra)
    dataset.candidates = corrupt(dataset.true_labels, dataset.num_classes, spec)
    dataset.corruption = spec.describe()
    dataset.validate()
    return dataset


def recipe(epochs: int) -> TrainConfig:
    return TrainConfig(
        MLP, epochs=epochs, batch_size=256, learning_rate=0.05, momentum=0.9, weight_decay=1e-6, seed=1, eval_every=10_000
    )


def test_uniform_two_extra_labels(mnist_dir):
    train_set, test_set = mnist(mnist_dir)
    train_set = with_extra(train_set, 2)
    assert average_candidate_count(train_set) == 3.0
    _, history = train(train_set, recipe(50), test_set)
    assert history.last.test_accuracy >= 0.97


def test_accuracy_falls_with_ambiguity(mnist_dir):
    train_set, test_set = mnist(mnist_dir)
    base = subsample(train_set, 20_000, seed=0)
    accuracies = []
    for extra in (2, 5, 9):
        _, history = train(with_extra(base.take(range(len(base))), extra), recipe(20), test_set)
        accuracies.append(history.last.test_accuracy)
    assert accuracies[0] > accuracies[1] > accuracies[2]
    assert accuracies[2] >= 0.75
