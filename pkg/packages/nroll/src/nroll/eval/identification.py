from __future__ import annotations

import numpy as np

from ..errors import VerificationInputError
from .verification import Embedder


def gallery_probe_split(identities: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """One random gallery row per identity; every other row is a probe. Both sorted."""
    identities = np.asarray(identities)
    gallery = []
    for c in np.unique(identities):
        gallery.append(int(rng.choice(np.flatnonzero(identities == c))))
    gallery_rows = np.sort(np.asarray(gallery, dtype=np.int64))
    probe_rows = np.setdiff1d(np.arange(identities.size), gallery_rows)
    return gallery_rows, probe_rows


def rank1(
    embedder: Embedder,
    gallery: np.ndarray,
    gallery_ids: np.ndarray,
    probes: np.ndarray,
    probe_ids: np.ndarray,
) -> float:
    """
    Fraction of probes whose most cosine-similar gallery embedding has the probe's identity.
    Ties go to the lowest gallery row.
    """
    gallery_ids = np.asarray(gallery_ids)
    probe_ids = np.asarray(probe_ids)
    if gallery_ids.size == 0:
        raise VerificationInputError("empty gallery")
    if probe_ids.size == 0:
        raise VerificationInputError("no probes")
    G = embedder(np.asarray(gallery))
    P = embedder(np.asarray(probes))
    nearest = np.argmax(P @ G.T, axis=1)
    return float(np.mean(gallery_ids[nearest] == probe_ids))
