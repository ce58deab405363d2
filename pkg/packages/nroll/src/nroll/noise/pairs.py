from __future__ import annotations

from typing import Callable, Protocol

import numpy as np

from ..errors import NoPairsError

Embedder = Callable[[np.ndarray], np.ndarray]


class PairSource(Protocol):
    features: np.ndarray
    labels: np.ndarray


def intra_pair_indices(labels: np.ndarray, max_pairs: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """
    Uniformly sample up to `max_pairs` distinct same-label pairs (i < j) as row indices.

    Pairs are numbered class by class; a sample of pair numbers is drawn without replacement
    and mapped back to (i, j) one class at a time.
    """
    labels = np.asarray(labels)
    classes, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
    eligible = np.flatnonzero(counts >= 2)
    if eligible.size == 0:
        raise NoPairsError()

    per_class = counts[eligible] * (counts[eligible] - 1) // 2
    total = int(per_class.sum())
    if total <= max_pairs:
        chosen = np.arange(total)
    else:
        chosen = np.sort(rng.choice(total, size=max_pairs, replace=False))
    starts = np.concatenate([[0], np.cumsum(per_class)])
    owner = np.searchsorted(starts, chosen, side="right") - 1

    left = np.empty(chosen.size, dtype=np.int64)
    right = np.empty(chosen.size, dtype=np.int64)
    for k in np.unique(owner):
        hit = owner == k
        members = np.flatnonzero(inverse == eligible[k])
        iu, ju = np.triu_indices(members.size, k=1)
        local = chosen[hit] - starts[k]
        left[hit] = members[iu[local]]
        right[hit] = members[ju[local]]
    return left, right


def sample_intra_pairs(
    data: PairSource, embedder: Embedder, max_pairs: int, rng: np.random.Generator
) -> np.ndarray:
    """Cosine similarities of uniformly sampled same-label pairs, clipped to [-1, 1]."""
    left, right = intra_pair_indices(data.labels, max_pairs, rng)
    rows = np.unique(np.concatenate([left, right]))
    F = embedder(data.features[rows])
    pos = np.searchsorted(rows, left), np.searchsorted(rows, right)
    sims = np.sum(F[pos[0]] * F[pos[1]], axis=1)
    return np.clip(sims, -1.0, 1.0)
