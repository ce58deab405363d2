from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyEffectiveBatch
from ..learner import MarginConfig, ModelParams, loss_and_grads


@dataclass(frozen=True)
class GroupLoss:
    loss: float
    grads: ModelParams
    hc_size: int
    mc_size: int


def combine_group_losses(hc_losses: np.ndarray, mc_losses: np.ndarray) -> float:
    """(sum of HC losses + sum of MC losses) / (|HC| + |MC_ms|)."""
    n = len(hc_losses) + len(mc_losses)
    if n == 0:
        raise EmptyEffectiveBatch(-1)
    return float((np.sum(hc_losses) + np.sum(mc_losses)) / n)


def group_loss(
    agent: int,
    params: ModelParams,
    X_hc: np.ndarray,
    y_hc: np.ndarray,
    X_mc: np.ndarray,
    y_mc: np.ndarray,
    cfg: MarginConfig,
) -> GroupLoss:
    """
    Balanced loss for one agent: MV-softmax over its HC rows and Arc-softmax over the MC
    rows it selected from its peers, both normalised by |HC| + |MC_ms|.
    """
    n_hc, n_mc = len(y_hc), len(y_mc)
    n = n_hc + n_mc
    if n == 0:
        raise EmptyEffectiveBatch(agent)
    d = X_hc.shape[1] if n_hc else X_mc.shape[1]
    X = np.concatenate([np.reshape(X_hc, (n_hc, d)), np.reshape(X_mc, (n_mc, d))])
    y = np.concatenate([np.asarray(y_hc, dtype=np.int64), np.asarray(y_mc, dtype=np.int64)])
    t = np.concatenate([np.full(n_hc, cfg.mv_t), np.ones(n_mc)])
    out = loss_and_grads(params, X, y, cfg, t=t, weights=np.full(n, 1.0 / n))
    return GroupLoss(
        loss=combine_group_losses(out.losses[:n_hc], out.losses[n_hc:]),
        grads=out.grads,
        hc_size=n_hc,
        mc_size=n_mc,
    )
