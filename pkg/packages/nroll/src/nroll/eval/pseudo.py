from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from ..datasets import UnlabelledPart
from .truth import hidden_truth


@dataclass(frozen=True)
class PseudoLabelScore:
    precision: float
    coverage: float
    empty: bool  # nothing accepted; precision is reported as 1.0
    accepted: int
    correct: int
    total: int

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "coverage": self.coverage,
            "empty": self.empty,
            "accepted": self.accepted,
            "correct": self.correct,
            "total": self.total,
        }


def majority_truth(labels: np.ndarray, truth: np.ndarray) -> dict[int, int]:
    """label -> most common true class among its members (ties to the smaller class id)."""
    out = {}
    for lab in np.unique(labels):
        counts = Counter(truth[labels == lab].tolist())
        out[int(lab)] = min(counts, key=lambda c: (-counts[c], c))
    return out


def identity_purity(labels: np.ndarray, truth: np.ndarray) -> Optional[float]:
    """Share of samples agreeing with their identity's majority truth; None when empty."""
    labels, truth = np.asarray(labels), np.asarray(truth)
    if labels.size == 0:
        return None
    major = majority_truth(labels, truth)
    return float(np.mean([major[int(lab)] == t for lab, t in zip(labels, truth)]))


def pseudo_label_accuracy(
    ids: np.ndarray,
    labels: np.ndarray,
    part: UnlabelledPart,
    class_map: Optional[Mapping[int, int]] = None,
    first_new_class: Optional[int] = None,
) -> PseudoLabelScore:
    """
    Precision of accepted pseudo labels against the part's hidden truth, and the accepted share.

    `class_map` translates original class ids to labelled-set ids (open-set splits). Labels at or
    above `first_new_class` are new identities and count as correct when they match their
    identity's majority truth.
    """
    ids = np.asarray(ids, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    total = len(part)
    if ids.size == 0:
        return PseudoLabelScore(precision=1.0, coverage=0.0, empty=True, accepted=0, correct=0, total=total)

    order = np.argsort(part.ids)
    at = np.minimum(np.searchsorted(part.ids, ids, sorter=order), max(total - 1, 0))
    pos = order[at] if total else at
    if not total or not np.array_equal(part.ids[pos], ids):
        raise ValueError("pseudo-labelled ids are not all in the part")
    truth = hidden_truth(part)[pos]

    known = np.ones(ids.size, dtype=bool) if first_new_class is None else labels < first_new_class
    if class_map is not None:
        mapped = np.array([class_map.get(int(c), -1) for c in truth], dtype=np.int64)
    else:
        mapped = truth
    correct = int(np.sum(labels[known] == mapped[known]))
    if not known.all():
        major = majority_truth(labels[~known], truth[~known])
        correct += int(sum(major[int(lab)] == t for lab, t in zip(labels[~known], truth[~known])))
    return PseudoLabelScore(
        precision=correct / ids.size,
        coverage=ids.size / total if total else 0.0,
        empty=False,
        accepted=int(ids.size),
        correct=correct,
        total=total,
    )
