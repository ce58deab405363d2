from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyBatchError


def lc_count(r_percent: float, batch_size: int) -> int:
    # small epsilon so r * B / 100 landing on an integer is not lost to rounding
    return int(math.floor(r_percent * batch_size / 100.0 + 1e-9))


@dataclass(frozen=True)
class BatchPartition:
    """Batch-local index sets (positions 0..B-1), each sorted ascending."""

    batch_size: int
    hc: np.ndarray
    lc_per_agent: tuple[np.ndarray, ...]
    mc_per_agent: tuple[np.ndarray, ...]

    @property
    def agents(self) -> int:
        return len(self.lc_per_agent)

    def check(self, r_percent: float | None = None) -> None:
        """Assert the tiling invariants; raises AssertionError on violation."""
        full = set(range(self.batch_size))
        hc = set(self.hc.tolist())
        non_lc = [full - set(lc.tolist()) for lc in self.lc_per_agent]
        assert hc == set.intersection(*non_lc), "HC is not the intersection of the non-LC sets"
        for m, (lc, mc) in enumerate(zip(self.lc_per_agent, self.mc_per_agent)):
            lc_s, mc_s = set(lc.tolist()), set(mc.tolist())
            assert not (lc_s & mc_s) and not (lc_s & hc) and not (mc_s & hc), f"agent {m}: sets overlap"
            assert lc_s | mc_s | hc == full, f"agent {m}: sets do not cover the batch"
            if r_percent is not None:
                assert len(lc_s) == lc_count(r_percent, self.batch_size), f"agent {m}: wrong LC size"


def partition_batch(losses: np.ndarray, r_percent: float) -> BatchPartition:
    """
    Split a batch by per-agent loss ranking.

    losses: (M, B) per-sample losses. Each agent's LC is its floor(r * B / 100) largest
    losses, ties going to the lower index first. HC is the intersection of all non-LC
    sets and MC_m is agent m's non-LC minus HC.
    """
    losses = np.asarray(losses, dtype=np.float64)
    if losses.ndim != 2 or losses.shape[1] == 0:
        raise EmptyBatchError(f"empty batch (loss matrix shape {losses.shape})")
    if not np.all(np.isfinite(losses)):
        raise ValueError("losses must be finite")
    if not (0.0 <= r_percent < 100.0):
        raise ValueError(f"r_percent must be in [0, 100), got {r_percent}")

    M, B = losses.shape
    n_lc = lc_count(r_percent, B)
    positions = np.arange(B)
    keep = np.ones((M, B), dtype=bool)
    lcs = []
    for m in range(M):
        # descending loss, then ascending index
        order = np.lexsort((positions, -losses[m]))
        lc = np.sort(order[:n_lc])
        keep[m, lc] = False
        lcs.append(lc)

    in_hc = keep.all(axis=0)
    hc = positions[in_hc]
    mcs = tuple(positions[keep[m] & ~in_hc] for m in range(M))
    return BatchPartition(batch_size=B, hc=hc, lc_per_agent=tuple(lcs), mc_per_agent=mcs)
