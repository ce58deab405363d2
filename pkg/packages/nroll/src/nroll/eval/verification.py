"""Pair verification: cosine scores, best-threshold accuracy and TPR at fixed FPR."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from sklearn.metrics import roc_curve

from ..errors import VerificationInputError

log = logging.getLogger(__name__)

FPR_POINTS = (1e-1, 1e-2)
MIN_PAIRS_PER_POLARITY = 10

Embedder = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PairSet:
    """Row-index pairs into some feature matrix; `same` marks pairs of one identity."""

    left: np.ndarray
    right: np.ndarray
    same: np.ndarray

    def __len__(self) -> int:
        return int(self.same.size)


@dataclass(frozen=True)
class VerificationResult:
    accuracy: float
    threshold: float
    tpr_at_fpr: dict[float, float]
    fpr: np.ndarray = field(repr=False)
    tpr: np.ndarray = field(repr=False)
    thresholds: np.ndarray = field(repr=False)

    def roc_rows(self) -> list[tuple[float, float, float]]:
        return [(float(t), float(f), float(p)) for t, f, p in zip(self.thresholds, self.fpr, self.tpr)]

    def to_json(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "threshold": self.threshold,
            "tpr_at_fpr": {f"{k:g}": v for k, v in self.tpr_at_fpr.items()},
        }


def make_verification_pairs(labels: np.ndarray, n_pairs: int, rng: np.random.Generator) -> PairSet:
    """
    About n_pairs/2 same-identity and n_pairs/2 different-identity pairs, drawn with replacement.

    Identities with a single sample cannot form positive pairs and are only used as negatives.
    """
    labels = np.asarray(labels)
    if n_pairs < 2:
        raise VerificationInputError(f"need at least 2 pairs, got {n_pairs}")
    classes, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
    if classes.size < 2:
        raise VerificationInputError("need at least two identities to form negative pairs")
    multi = np.flatnonzero(counts >= 2)
    if multi.size == 0:
        raise VerificationInputError("no identity has two samples; cannot form positive pairs")
    members = [np.flatnonzero(inverse == k) for k in range(classes.size)]

    n_pos = n_pairs // 2
    pos_cls = rng.choice(multi, size=n_pos)
    pos = np.array([rng.choice(members[k], size=2, replace=False) for k in pos_cls]).reshape(-1, 2)

    n_neg = n_pairs - n_pos
    neg = np.empty((n_neg, 2), dtype=np.int64)
    for i in range(n_neg):
        a, b = rng.choice(classes.size, size=2, replace=False)
        neg[i] = rng.choice(members[a]), rng.choice(members[b])

    rows = np.concatenate([pos, neg]).astype(np.int64)
    same = np.concatenate([np.ones(n_pos, dtype=bool), np.zeros(n_neg, dtype=bool)])
    return PairSet(left=rows[:, 0], right=rows[:, 1], same=same)


def pair_scores(embedder: Embedder, features: np.ndarray, pairs: PairSet) -> np.ndarray:
    rows, inv = np.unique(np.concatenate([pairs.left, pairs.right]), return_inverse=True)
    F = embedder(features[rows])
    n = len(pairs)
    return np.clip(np.sum(F[inv[:n]] * F[inv[n:]], axis=1), -1.0, 1.0)


def verification_from_scores(
    scores: np.ndarray, same: np.ndarray, fpr_points: Sequence[float] = FPR_POINTS
) -> VerificationResult:
    scores = np.asarray(scores, dtype=np.float64)
    same = np.asarray(same, dtype=bool)
    n_pos = int(same.sum())
    n_neg = int(same.size - n_pos)
    if n_pos < MIN_PAIRS_PER_POLARITY or n_neg < MIN_PAIRS_PER_POLARITY:
        raise VerificationInputError(
            f"need at least {MIN_PAIRS_PER_POLARITY} pairs of each polarity, got {n_pos} same and {n_neg} different"
        )
    fpr, tpr, thresholds = roc_curve(same, scores, drop_intermediate=False)
    acc = (tpr * n_pos + (1.0 - fpr) * n_neg) / (n_pos + n_neg)
    best = int(np.argmax(acc))
    tpr_at = {}
    for point in sorted(fpr_points, reverse=True):
        ok = fpr <= point
        tpr_at[float(point)] = float(tpr[ok].max()) if ok.any() else 0.0
    return VerificationResult(
        accuracy=float(acc[best]),
        threshold=float(thresholds[best]),
        tpr_at_fpr=tpr_at,
        fpr=fpr,
        tpr=tpr,
        thresholds=thresholds,
    )


def verification_accuracy(
    embedder: Embedder, features: np.ndarray, pairs: PairSet, fpr_points: Sequence[float] = FPR_POINTS
) -> VerificationResult:
    """Cosine-similarity verification of `pairs` with the threshold swept over observed scores."""
    result = verification_from_scores(pair_scores(embedder, features, pairs), pairs.same, fpr_points)
    log.info("verification accuracy %.4f at threshold %.4f over %d pairs", result.accuracy, result.threshold, len(pairs))
    return result
