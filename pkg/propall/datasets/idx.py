"""IDX tensors, the container format of the MNIST family.

Layout (big endian): two zero bytes, an element-type byte, a dimension
count byte, one u32 size per dimension, then the row-major payload.
"""

import logging
import os
import struct

import numpy as np

from ..exceptions import DimensionMismatchError, FormatError, ValidationError
from ..helpers import read_bytes
from .base import PllDataset

logger = logging.getLogger(__name__)

IDX_UBYTE = 0x08
# element types defined by the format that we do not read
IDX_OTHER_TYPES = {0x09: "i8", 0x0B: "i16", 0x0C: "i32", 0x0D: "f32", 0x0E: "f64"}


def parse_idx(raw: bytes) -> np.ndarray:
    if len(raw) < 4:
        raise FormatError("IDX header truncated")
    zero, dtype_code, ndim = struct.unpack(">HBB", raw[:4])
    if zero != 0 or (dtype_code != IDX_UBYTE and dtype_code not in IDX_OTHER_TYPES):
        raise FormatError(f"bad IDX magic {raw[:4].hex()}")
    if dtype_code != IDX_UBYTE:
        raise FormatError(f"unsupported IDX element type {IDX_OTHER_TYPES[dtype_code]} (0x{dtype_code:02x})")
    if ndim == 0:
        raise FormatError("IDX tensor with zero dimensions")
    header_end = 4 + 4 * ndim
    if len(raw) < header_end:
        raise FormatError("IDX dimension sizes truncated")
    dims = struct.unpack(f">{ndim}I", raw[4:header_end])
    expected = int(np.prod(dims, dtype=np.int64))
    payload = raw[header_end:]
    if len(payload) < expected:
        raise FormatError(f"IDX payload truncated: {len(payload)} bytes, expected {expected}")
    if len(payload) > expected:
        raise FormatError(f"IDX payload has {len(payload) - expected} trailing bytes")
    return np.frombuffer(payload, dtype=np.uint8).reshape(dims).copy()


def load_idx(path: str | os.PathLike) -> np.ndarray:
    """Read an IDX file (gzip-compressed files are detected by magic)."""
    tensor = parse_idx(read_bytes(path))
    logger.debug("loaded IDX %s with dims %s", path, tensor.shape)
    return tensor


def load_idx_dataset(images_path: str | os.PathLike, labels_path: str | os.PathLike, num_classes: int | None = None) -> PllDataset:
    """Image/label IDX pair as a dataset with singleton candidate sets."""
    images = load_idx(images_path)
    labels = load_idx(labels_path)
    if labels.ndim != 1:
        raise FormatError(f"label file must hold a vector, got dims {labels.shape}")
    if images.shape[0] != labels.shape[0]:
        raise DimensionMismatchError(f"{images.shape[0]} images but {labels.shape[0]} labels")
    labels = labels.astype(np.int64)
    k = num_classes if num_classes is not None else int(labels.max()) + 1 if labels.size else 0
    if labels.size and labels.max() >= k:
        raise ValidationError(f"label {labels.max()} out of range for k={k}")
    features = images.reshape(images.shape[0], -1).astype(np.float64)
    candidates = np.zeros((labels.shape[0], k), dtype=bool)
    candidates[np.arange(labels.shape[0]), labels] = True
    return PllDataset(features, candidates, k, true_labels=labels, corruption="none")
