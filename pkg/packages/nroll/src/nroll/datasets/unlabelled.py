from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import DatasetError


class UnlabelledPart:
    """
    One unlabelled part: ids and features. The true identities travel with the part for
    scoring but are only reachable through `nroll.eval.hidden_truth`.
    """

    __slots__ = ("_ids", "_features", "_truth", "index")

    def __init__(self, ids: np.ndarray, features: np.ndarray, truth: Optional[np.ndarray] = None, index: int = 0):
        ids = np.array(ids, dtype=np.int64).reshape(-1)
        features = np.array(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] != ids.size:
            raise DatasetError(f"features must be ({ids.size}, d), got {features.shape}")
        if np.unique(ids).size != ids.size:
            raise DatasetError("sample ids must be unique")
        if truth is not None:
            truth = np.array(truth, dtype=np.int64).reshape(-1)
            if truth.size != ids.size:
                raise DatasetError("truth must have one entry per sample")
            truth.setflags(write=False)
        ids.setflags(write=False)
        features.setflags(write=False)
        self._ids = ids
        self._features = features
        self._truth = truth
        self.index = index

    @property
    def ids(self) -> np.ndarray:
        return self._ids

    @property
    def features(self) -> np.ndarray:
        return self._features

    def __len__(self) -> int:
        return int(self._ids.size)

    def __repr__(self) -> str:
        return f"UnlabelledPart(index={self.index}, n={len(self)}, d={self._features.shape[1]})"
