from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import DatasetError

SEED_PROVENANCE = 0
NO_TRUTH = -1


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabelledSet:
    """
    Labelled samples: ids, raw features (N, d_in), labels and ground truth (NO_TRUTH when
    unknown), plus provenance: 0 for seed samples, t for samples pseudo-labelled in loop t.
    Arrays are read-only.
    """

    ids: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    gt_labels: np.ndarray
    provenance: np.ndarray
    num_classes: int

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64).reshape(-1)
        n = ids.size
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] != n:
            raise DatasetError(f"features must be ({n}, d), got {features.shape}")
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        gt = np.asarray(self.gt_labels, dtype=np.int64).reshape(-1)
        prov = np.asarray(self.provenance, dtype=np.int64).reshape(-1)
        if not (labels.size == gt.size == prov.size == n):
            raise DatasetError("ids, labels, gt_labels and provenance must have the same length")
        if np.unique(ids).size != n:
            raise DatasetError("sample ids must be unique")
        if n and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise DatasetError(f"labels must be in [0, {self.num_classes})")
        for name, arr in (("ids", ids), ("features", features), ("labels", labels), ("gt_labels", gt), ("provenance", prov)):
            object.__setattr__(self, name, _frozen(arr))

    @classmethod
    def create(
        cls,
        ids: Sequence[int] | np.ndarray,
        features: np.ndarray,
        labels: Sequence[int] | np.ndarray,
        num_classes: Optional[int] = None,
        gt_labels: Optional[Sequence[int] | np.ndarray] = None,
        provenance: Optional[Sequence[int] | np.ndarray] = None,
    ) -> "LabelledSet":
        labels = np.asarray(labels, dtype=np.int64)
        n = labels.size
        if num_classes is None:
            num_classes = int(labels.max()) + 1 if n else 0
        return cls(
            ids=np.asarray(ids, dtype=np.int64),
            features=np.asarray(features, dtype=np.float64).reshape(n, -1) if n else np.asarray(features, dtype=np.float64),
            labels=labels,
            gt_labels=np.full(n, NO_TRUTH) if gt_labels is None else np.asarray(gt_labels, dtype=np.int64),
            provenance=np.full(n, SEED_PROVENANCE) if provenance is None else np.asarray(provenance, dtype=np.int64),
            num_classes=num_classes,
        )

    def __len__(self) -> int:
        return int(self.ids.size)

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def has_truth(self) -> bool:
        return bool(np.any(self.gt_labels >= 0))

    def subset(self, rows: np.ndarray) -> "LabelledSet":
        rows = np.asarray(rows)
        return LabelledSet(
            ids=self.ids[rows],
            features=self.features[rows],
            labels=self.labels[rows],
            gt_labels=self.gt_labels[rows],
            provenance=self.provenance[rows],
            num_classes=self.num_classes,
        )

    def with_labels(self, labels: np.ndarray, gt_labels: Optional[np.ndarray] = None) -> "LabelledSet":
        return LabelledSet(
            ids=self.ids,
            features=self.features,
            labels=labels,
            gt_labels=self.gt_labels if gt_labels is None else gt_labels,
            provenance=self.provenance,
            num_classes=self.num_classes,
        )

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes)

    def from_loop(self, t: int) -> "LabelledSet":
        """Samples whose provenance is loop t (0 is the seed set)."""
        return self.subset(np.flatnonzero(self.provenance == t))

    def noise_fraction(self) -> Optional[float]:
        """Share of samples with known truth whose label disagrees with it."""
        known = self.gt_labels >= 0
        if not known.any():
            return None
        return float(np.mean(self.labels[known] != self.gt_labels[known]))

    def equals(self, other: "LabelledSet") -> bool:
        return (
            self.num_classes == other.num_classes
            and np.array_equal(self.ids, other.ids)
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.gt_labels, other.gt_labels)
            and np.array_equal(self.provenance, other.provenance)
        )
