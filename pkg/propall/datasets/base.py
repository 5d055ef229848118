from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from ..enums import NormalizeMode
from ..exceptions import DimensionMismatchError, EmptyCandidateSetError, ValidationError
from ..gumbel import RandomSource
from ..loss import CandidateSet

UNKNOWN_LABEL = -1


@dataclass
class PllDataset:
    """Features plus one candidate set per instance.

    ``candidates`` is an ``n x k`` boolean mask. ``true_labels`` is optional
    and may hold ``UNKNOWN_LABEL`` for individual rows; known labels must lie
    inside their candidate set.
    """

    features: np.ndarray
    candidates: np.ndarray
    num_classes: int
    true_labels: np.ndarray | None = None
    corruption: str = "none"

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.candidates = np.asarray(self.candidates, dtype=bool)
        if self.true_labels is not None:
            self.true_labels = np.asarray(self.true_labels, dtype=np.int64)
        self.validate()

    def validate(self) -> None:
        n = self.features.shape[0]
        if self.features.ndim != 2:
            raise DimensionMismatchError(f"features must be n x d, got {self.features.shape}")
        if self.candidates.shape != (n, self.num_classes):
            raise DimensionMismatchError(f"candidate mask {self.candidates.shape} does not match n={n}, k={self.num_classes}")
        if n and not self.candidates.any(axis=1).all():
            bad = int(np.flatnonzero(~self.candidates.any(axis=1))[0])
            raise EmptyCandidateSetError(f"row {bad} has an empty candidate set")
        if self.true_labels is not None:
            t = self.true_labels
            if t.shape != (n,):
                raise DimensionMismatchError(f"{t.size} true labels for {n} rows")
            if ((t < UNKNOWN_LABEL) | (t >= self.num_classes)).any():
                raise ValidationError(f"true label out of range for k={self.num_classes}")
            known = t != UNKNOWN_LABEL
            inside = self.candidates[np.flatnonzero(known), t[known]]
            if not inside.all():
                bad = int(np.flatnonzero(known)[np.flatnonzero(~inside)[0]])
                raise ValidationError(f"row {bad}: true label {t[bad]} is not among its candidates")

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def has_true_labels(self) -> bool:
        return self.true_labels is not None and bool((self.true_labels != UNKNOWN_LABEL).all())

    def candidate_sets(self) -> list[CandidateSet]:
        return [CandidateSet.from_mask(row) for row in self.candidates]

    def take(self, indices) -> "PllDataset":
        idx = np.asarray(indices, dtype=np.int64)
        labels = None if self.true_labels is None else self.true_labels[idx]
        return replace(self, features=self.features[idx], candidates=self.candidates[idx], true_labels=labels)


def average_candidate_count(dataset: PllDataset) -> float:
    """Mean |S| over the dataset."""
    if len(dataset) == 0:
        return 0.0
    return float(dataset.candidates.sum(axis=1).mean())


def select_classes(dataset: PllDataset, classes) -> PllDataset:
    """Keep rows whose true label is in ``classes``; relabel them 0..len-1.

    Candidate labels outside ``classes`` are dropped from every set.
    """
    classes = [int(c) for c in classes]
    if not classes or len(set(classes)) != len(classes):
        raise ValidationError("classes must be a non-empty list without repeats")
    if not dataset.has_true_labels:
        raise ValidationError("selecting classes needs known true labels")
    if any(not 0 <= c < dataset.num_classes for c in classes):
        raise ValidationError(f"class outside 0..{dataset.num_classes - 1}")
    rows = np.flatnonzero(np.isin(dataset.true_labels, classes))
    remap = np.full(dataset.num_classes, UNKNOWN_LABEL, dtype=np.int64)
    remap[classes] = np.arange(len(classes))
    return PllDataset(
        features=dataset.features[rows],
        candidates=dataset.candidates[np.ix_(rows, classes)],
        num_classes=len(classes),
        true_labels=remap[dataset.true_labels[rows]],
        corruption=dataset.corruption,
    )


def subsample(dataset: PllDataset, n: int, seed: int) -> PllDataset:
    if not 0 < n <= len(dataset):
        raise ValidationError(f"cannot draw {n} rows from a dataset of {len(dataset)}")
    rows = np.sort(RandomSource(seed).generator.choice(len(dataset), size=n, replace=False))
    return dataset.take(rows)


@dataclass(frozen=True)
class FeatureScaler:
    """Per-feature affine transform fitted on training data.

    Constant features have scale 0 and map to 0.
    """

    mode: NormalizeMode
    offset: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray, mode: NormalizeMode) -> "FeatureScaler":
        x = np.asarray(features, dtype=np.float64)
        d = x.shape[1]
        if mode is NormalizeMode.none:
            return cls(mode, np.zeros(d), np.ones(d))
        if mode is NormalizeMode.zscore:
            if x.shape[0] < 2:
                raise ValidationError("z-score normalisation needs at least 2 rows")
            return cls(mode, x.mean(axis=0), x.std(axis=0))
        if x.shape[0] == 0:
            raise ValidationError("min-max normalisation needs at least 1 row")
        lo = x.min(axis=0)
        return cls(mode, lo, x.max(axis=0) - lo)

    def transform(self, features: np.ndarray) -> np.ndarray:
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.offset.shape[0]:
            raise DimensionMismatchError(f"scaler fitted on width {self.offset.shape[0]}, got {x.shape}")
        if self.mode is NormalizeMode.none:
            return x.copy()
        safe = np.where(self.scale > 0.0, self.scale, 1.0)
        return np.where(self.scale > 0.0, (x - self.offset) / safe, 0.0)

    def apply(self, dataset: PllDataset) -> PllDataset:
        return replace(dataset, features=self.transform(dataset.features))

    def to_dict(self) -> dict[str, Any]:
        return {"mode": self.mode.value, "offset": self.offset.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "FeatureScaler":
        return cls(NormalizeMode(doc["mode"]), np.asarray(doc["offset"], dtype=np.float64), np.asarray(doc["scale"], dtype=np.float64))


def normalize_features(dataset: PllDataset, mode: NormalizeMode) -> PllDataset:
    return FeatureScaler.fit(dataset.features, mode).apply(dataset)
