from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .gmm import MIN_MEAN_GAP, GmmFit, fit_gmm2
from .pairs import Embedder, PairSource, sample_intra_pairs

log = logging.getLogger(__name__)

RateMode = Literal["sample", "pair"]
HIST_BINS = 100


@dataclass(frozen=True)
class NoiseConfig:
    max_pairs: int = 50_000
    max_iters: int = 200
    tol: float = 1e-6
    min_gap: float = MIN_MEAN_GAP
    # off by default; set (e.g. 2.0) to also reject fits whose components overlap heavily
    min_separation: Optional[float] = None
    # "pair": weight of the low-similarity component as is.
    # "sample": per-sample rate r with 1 - (1 - r)^2 = that weight (a pair is noisy if either end is).
    rate_mode: RateMode = "sample"

    def __post_init__(self):
        if self.max_pairs < 1:
            raise ValueError(f"max_pairs must be >= 1, got {self.max_pairs}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.min_separation is not None and not self.min_separation > 0:
            raise ValueError(f"min_separation must be > 0 or unset, got {self.min_separation}")
        if self.rate_mode not in ("sample", "pair"):
            raise ValueError(f"rate_mode must be 'sample' or 'pair', got {self.rate_mode!r}")


@dataclass(frozen=True)
class NoiseEstimate:
    rate: float
    pair_rate: float
    degenerate: bool
    pair_count: int
    fit: GmmFit
    similarities: Optional[np.ndarray] = None

    @property
    def r_percent(self) -> float:
        return 100.0 * self.rate

    def to_json(self) -> dict:
        return {
            "rate": self.rate,
            "pair_rate": self.pair_rate,
            "degenerate": self.degenerate,
            "pair_count": self.pair_count,
            "gmm": self.fit.to_json(),
        }


def pair_to_sample_rate(w: float) -> float:
    return 1.0 - math.sqrt(max(0.0, 1.0 - w))


def rate_from_fit(fit: GmmFit, cfg: NoiseConfig) -> tuple[float, float, bool]:
    """(rate, pair_rate, degenerate) for a fitted mixture; unresolved fits report 0."""
    degenerate = fit.is_degenerate(cfg.min_gap, cfg.min_separation)
    if degenerate:
        return 0.0, 0.0, True
    w = fit.weights[0]
    rate = pair_to_sample_rate(w) if cfg.rate_mode == "sample" else w
    return rate, w, False


def estimate_noise_rate(
    data: PairSource, embedder: Embedder, cfg: NoiseConfig = NoiseConfig(), rng: Optional[np.random.Generator] = None
) -> NoiseEstimate:
    """
    Noise rate of a labelled set from the similarity of its same-label pairs.

    Clean pairs sit in the high-similarity component; the low-mean component's weight is
    the (pair-level) noise. The rate is not clamped: values above 0.5 are legitimate.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    sims = sample_intra_pairs(data, embedder, cfg.max_pairs, rng)
    fit = fit_gmm2(sims, cfg.max_iters, cfg.tol)
    rate, pair_rate, degenerate = rate_from_fit(fit, cfg)
    if degenerate:
        log.warning(
            "degenerate GMM fit (gap %.4f, separation %.2f); reporting noise rate 0",
            fit.mean_gap, fit.separation,
        )
    log.info("estimated noise rate %.4f (pair rate %.4f) from %d pairs", rate, pair_rate, sims.size)
    return NoiseEstimate(
        rate=rate, pair_rate=pair_rate, degenerate=degenerate, pair_count=int(sims.size), fit=fit, similarities=sims
    )


def similarity_histogram(similarities: np.ndarray, bins: int = HIST_BINS) -> tuple[np.ndarray, np.ndarray]:
    """(bin centres, counts) over [-1, 1]."""
    counts, edges = np.histogram(np.clip(similarities, -1.0, 1.0), bins=bins, range=(-1.0, 1.0))
    return (edges[:-1] + edges[1:]) / 2.0, counts
