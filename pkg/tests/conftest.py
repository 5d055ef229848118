import os
import struct

import numpy as np
import pytest

from propall.datasets import PllDataset


def idx_bytes(array: np.ndarray) -> bytes:
    """Hand-encode an unsigned-byte IDX tensor."""
    array = np.asarray(array, dtype=np.uint8)
    header = struct.pack(">HBB", 0, 0x08, array.ndim) + struct.pack(f">{array.ndim}I", *array.shape)
    return header + array.tobytes()


@pytest.fixture
def write_idx(tmp_path):
    def write(name: str, array: np.ndarray) -> str:
        path = tmp_path / name
        path.write_bytes(idx_bytes(array))
        return str(path)

    return write


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def blobs(centers, per_class: int, spread: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    gen = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=np.float64)
    x = np.concatenate([c + spread * gen.standard_normal((per_class, centers.shape[1])) for c in centers])
    y = np.repeat(np.arange(len(centers)), per_class)
    order = gen.permutation(len(y))
    return x[order], y[order]


@pytest.fixture
def separable():
    """200 points in two well separated clusters, singleton labels."""
    x, y = blobs([(-2.0, -2.0), (2.0, 2.0)], 100, 0.5, seed=3)
    candidates = np.arange(2)[None, :] == y[:, None]
    return PllDataset(x, candidates, 2, true_labels=y)


@pytest.fixture
def cooccurring():
    """Classes 0 and 1 always share a candidate set; class 2 is always alone."""
    x, y = blobs([(-3.0, 0.0), (0.0, 3.0), (3.0, -3.0)], 60, 0.4, seed=5)
    candidates = np.zeros((len(y), 3), dtype=bool)
    candidates[y < 2, 0] = True
    candidates[y < 2, 1] = True
    candidates[y == 2, 2] = True
    return PllDataset(x, candidates, 3, true_labels=y, corruption="fixed(extra=1)")


@pytest.fixture
def mnist_dir():
    path = os.environ.get("PROPALL_MNIST_DIR")
    if not path:
        pytest.skip("PROPALL_MNIST_DIR not set")
    return path
