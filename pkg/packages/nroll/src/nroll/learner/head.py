from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ClassHead:
    """Class-weight matrix W (C x d_e); rows are kept at unit norm."""

    W: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.W.shape[0]

    @property
    def embed_dim(self) -> int:
        return self.W.shape[1]

    def renormalized(self) -> "ClassHead":
        return ClassHead(normalize_rows(self.W))

    def with_rows(self, rows: np.ndarray) -> "ClassHead":
        rows = normalize_rows(np.atleast_2d(rows))
        return ClassHead(np.vstack([self.W, rows]))


def normalize_rows(W: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(W, axis=1, keepdims=True)
    return W / np.where(norms > 0, norms, 1.0)


def init_head(num_classes: int, embed_dim: int, rng: np.random.Generator) -> ClassHead:
    if num_classes < 1 or embed_dim < 1:
        raise ValueError(f"invalid head shape ({num_classes}, {embed_dim})")
    return ClassHead(normalize_rows(rng.normal(size=(num_classes, embed_dim))))
