from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..errors import DatasetError
from .labelled import LabelledSet

log = logging.getLogger(__name__)


def random_prototypes(classes: int, d_in: int, rng: np.random.Generator) -> np.ndarray:
    P = rng.normal(size=(classes, d_in))
    return P / np.linalg.norm(P, axis=1, keepdims=True)


def gen_synthetic(
    classes: int = 50,
    per_class: int = 60,
    d_in: int = 32,
    intra_spread: float = 0.2,
    seed: int = 0,
    prototypes: Optional[np.ndarray] = None,
) -> LabelledSet:
    """
    Gaussian blobs around unit prototype directions.

    Sample i of class c is prototype_c + N(0, intra_spread^2 I). Labels are clean and double
    as ground truth; ids run 0..N-1 grouped by class. `prototypes` (C, d_in) overrides the
    random directions.
    """
    if d_in < 2:
        raise DatasetError(f"d_in must be >= 2, got {d_in}")
    if classes < 2 or per_class < 2:
        raise DatasetError(f"need classes >= 2 and per_class >= 2, got {classes} and {per_class}")
    if intra_spread < 0:
        raise DatasetError(f"intra_spread must be >= 0, got {intra_spread}")
    rng = np.random.default_rng(seed)
    if prototypes is None:
        prototypes = random_prototypes(classes, d_in, rng)
    else:
        prototypes = np.asarray(prototypes, dtype=np.float64)
        if prototypes.shape != (classes, d_in):
            raise DatasetError(f"prototypes must be ({classes}, {d_in}), got {prototypes.shape}")

    labels = np.repeat(np.arange(classes), per_class)
    features = prototypes[labels] + intra_spread * rng.normal(size=(labels.size, d_in))
    log.debug("generated %d samples in %d classes (d_in=%d, spread=%g)", labels.size, classes, d_in, intra_spread)
    return LabelledSet.create(
        ids=np.arange(labels.size),
        features=features,
        labels=labels,
        num_classes=classes,
        gt_labels=labels,
    )
