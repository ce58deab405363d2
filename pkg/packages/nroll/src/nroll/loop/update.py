from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..datasets import NO_TRUTH, LabelledSet
from ..errors import IdCollisionError
from .labelling import PseudoLabels

log = logging.getLogger(__name__)


def update_labelled(
    labelled: LabelledSet, pseudo: PseudoLabels, t: int, num_classes: Optional[int] = None
) -> LabelledSet:
    """
    Append pseudo-labelled samples tagged with provenance t. Seed rows are untouched and the
    new rows carry no ground truth. `num_classes` grows the class space (new identities).
    """
    if t < 1:
        raise ValueError(f"pseudo labels come from loop t >= 1, got {t}")
    num_classes = labelled.num_classes if num_classes is None else num_classes
    if num_classes < labelled.num_classes:
        raise ValueError(f"cannot shrink the class space from {labelled.num_classes} to {num_classes}")
    if len(pseudo) == 0:
        if num_classes == labelled.num_classes:
            return labelled
        return LabelledSet(
            ids=labelled.ids,
            features=labelled.features,
            labels=labelled.labels,
            gt_labels=labelled.gt_labels,
            provenance=labelled.provenance,
            num_classes=num_classes,
        )
    clash = np.intersect1d(labelled.ids, pseudo.ids)
    if clash.size:
        raise IdCollisionError(clash)
    n = len(pseudo)
    merged = LabelledSet(
        ids=np.concatenate([labelled.ids, pseudo.ids]),
        features=np.concatenate([labelled.features, pseudo.features]),
        labels=np.concatenate([labelled.labels, pseudo.labels]),
        gt_labels=np.concatenate([labelled.gt_labels, np.full(n, NO_TRUTH, dtype=np.int64)]),
        provenance=np.concatenate([labelled.provenance, np.full(n, t, dtype=np.int64)]),
        num_classes=max(num_classes, int(pseudo.labels.max()) + 1),
    )
    log.debug("labelled set %d -> %d samples after loop %d", len(labelled), len(merged), t)
    return merged
