from __future__ import annotations

import logging
from typing import Literal

import numpy as np

from .labelled import LabelledSet

log = logging.getLogger(__name__)

NoiseMode = Literal["symmetric", "pairflip"]
NOISE_MODES: tuple[str, ...] = ("symmetric", "pairflip")


def noise_transition_matrix(num_classes: int, rate: float, mode: NoiseMode) -> np.ndarray:
    """T[i, j] = P(observed j | true i) for the given corruption."""
    T = np.eye(num_classes) * (1.0 - rate)
    if mode == "symmetric":
        T += (1.0 - np.eye(num_classes)) * rate / (num_classes - 1)
    else:
        T[np.arange(num_classes), (np.arange(num_classes) + 1) % num_classes] += rate
    return T


def inject_noise(data: LabelledSet, rate: float, mode: NoiseMode = "symmetric", seed: int = 0) -> LabelledSet:
    """
    Flip each label independently with probability `rate`.

    symmetric: uniform over the other C-1 classes; pairflip: y -> (y + 1) mod C.
    Ground truth is kept (the pre-noise label where none was recorded).
    """
    if not (0.0 <= rate < 1.0):
        raise ValueError(f"noise rate must be in [0, 1), got {rate}")
    if mode not in NOISE_MODES:
        raise ValueError(f"unknown noise mode {mode!r}; expected one of {NOISE_MODES}")
    C = data.num_classes
    gt = np.where(data.gt_labels >= 0, data.gt_labels, data.labels)
    if rate == 0.0 or len(data) == 0 or C < 2:
        return data.with_labels(data.labels, gt)

    rng = np.random.default_rng(seed)
    flip = rng.random(len(data)) < rate
    if mode == "symmetric":
        shifted = (data.labels + rng.integers(1, C, size=len(data))) % C
    else:
        shifted = (data.labels + 1) % C
    labels = np.where(flip, shifted, data.labels)
    log.debug("flipped %d of %d labels (%s, rate %.3f)", int(flip.sum()), len(data), mode, rate)
    return data.with_labels(labels, gt)
