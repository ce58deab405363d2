"""Two-component 1-D Gaussian mixture fitted by EM."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from ..errors import EstimationError, InsufficientDataError

log = logging.getLogger(__name__)

MIN_SAMPLES = 20
VARIANCE_FLOOR = 1e-4
MIN_MEAN_GAP = 0.05
SUGGESTED_MIN_SEPARATION = 2.0  # Ashman's D below this: components overlap too much to call bimodal
_LL_SLACK = 1e-8


@dataclass(frozen=True)
class GmmFit:
    """Components ordered so that means[0] <= means[1]; the first is the noisy one."""

    means: tuple[float, float]
    variances: tuple[float, float]
    weights: tuple[float, float]
    iterations: int
    log_likelihood: float  # mean per-sample log-likelihood at the final parameters
    converged: bool
    history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def mean_gap(self) -> float:
        return self.means[1] - self.means[0]

    @property
    def separation(self) -> float:
        """Ashman's D: sqrt(2) |mu2 - mu1| / sqrt(var1 + var2)."""
        return math.sqrt(2.0) * abs(self.mean_gap) / math.sqrt(self.variances[0] + self.variances[1])

    def is_degenerate(self, min_gap: float = MIN_MEAN_GAP, min_separation: Optional[float] = None) -> bool:
        """Means closer than `min_gap`; with `min_separation` set, also an Ashman's D below it."""
        if self.mean_gap < min_gap:
            return True
        return min_separation is not None and self.separation < min_separation

    @property
    def degenerate(self) -> bool:
        return self.is_degenerate()

    def to_json(self) -> dict:
        return {
            "means": list(self.means),
            "variances": list(self.variances),
            "weights": list(self.weights),
            "iterations": self.iterations,
            "log_likelihood": self.log_likelihood,
            "converged": self.converged,
            "mean_gap": self.mean_gap,
            "separation": self.separation,
        }


def _log_normal(x: np.ndarray, mean: np.ndarray, var: np.ndarray) -> np.ndarray:
    return -0.5 * (np.log(2.0 * np.pi * var) + (x - mean) ** 2 / var)


def fit_gmm2(
    similarities: np.ndarray,
    max_iters: int = 200,
    tol: float = 1e-6,
    rng: Optional[np.random.Generator] = None,
    variance_floor: float = VARIANCE_FLOOR,
) -> GmmFit:
    """
    Standard EM: means start at the 25th/75th percentiles with equal weights and a shared
    variance; stops when the mean log-likelihood moves less than `tol` or after `max_iters`.

    The initialisation is deterministic, so `rng` is accepted for interface symmetry and unused.
    Raises EstimationError if the log-likelihood ever drops.
    """
    x = np.asarray(similarities, dtype=np.float64).reshape(-1)
    if x.size < MIN_SAMPLES:
        raise InsufficientDataError(x.size, MIN_SAMPLES)
    if not np.all(np.isfinite(x)):
        raise EstimationError("similarities must be finite")

    x = np.sort(x)  # order-independent sums
    xc = x[:, None]
    mean = np.percentile(x, [25.0, 75.0])
    var = np.full(2, max(float(np.var(x)), variance_floor))
    weight = np.array([0.5, 0.5])

    history: list[float] = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        # E step
        log_joint = np.log(weight) + _log_normal(xc, mean, var)
        log_norm = logsumexp(log_joint, axis=1)
        ll = float(np.mean(log_norm))
        if history and ll < history[-1] - _LL_SLACK * max(1.0, abs(history[-1])):
            raise EstimationError(f"EM log-likelihood decreased at iteration {it}: {history[-1]:.10g} -> {ll:.10g}")
        history.append(ll)
        if len(history) > 1 and abs(history[-1] - history[-2]) < tol:
            converged = True
            break
        resp = np.exp(log_joint - log_norm[:, None])

        # M step
        nk = resp.sum(axis=0)
        alive = nk > 1e-12
        new_mean = np.where(alive, (resp * xc).sum(axis=0) / np.where(alive, nk, 1.0), mean)
        new_var = np.where(alive, (resp * (xc - new_mean) ** 2).sum(axis=0) / np.where(alive, nk, 1.0), var)
        mean = new_mean
        var = np.maximum(new_var, variance_floor)
        weight = np.maximum(nk / x.size, 1e-300)
        weight = weight / weight.sum()

    order = np.argsort(mean, kind="stable")
    fit = GmmFit(
        means=(float(mean[order[0]]), float(mean[order[1]])),
        variances=(float(var[order[0]]), float(var[order[1]])),
        weights=(float(weight[order[0]]), float(1.0 - weight[order[0]])),
        iterations=it,
        log_likelihood=history[-1],
        converged=converged,
        history=tuple(history),
    )
    log.debug(
        "GMM fit: means=(%.4f, %.4f) weights=(%.4f, %.4f) after %d iterations%s",
        *fit.means, *fit.weights, it, "" if converged else " (not converged)",
    )
    return fit
