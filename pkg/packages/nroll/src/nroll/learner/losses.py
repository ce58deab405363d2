"""
Angular-margin softmax losses over unit embeddings and a unit-row class head.

For a row with cosines c (one per class) and target y:

    phi     = cos(arccos(c_y) + m)
    z_y     = s * phi
    z_k     = s * (t * c_k + t - 1)   if phi < c_k   (hard negative)
            = s * c_k                 otherwise
    loss    = logsumexp(z) - z_y

With t = 1 this is Arc-softmax; t > 1 gives the MV-Arc variant. Batched functions take
`t` per row, so one call can mix MV rows (HC) and Arc rows (MC).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp, softmax

from ..errors import MarginDomainError
from .head import ClassHead

COS_CLAMP = 1e-7
COS_TOLERANCE = 1e-6


@dataclass(frozen=True)
class MarginConfig:
    margin: float = 0.5
    scale: float = 32.0
    mv_t: float = 1.1

    def __post_init__(self):
        if not (0.0 <= self.margin < math.pi / 2):
            raise ValueError(f"margin must be in [0, pi/2), got {self.margin}")
        if not self.scale > 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        if not self.mv_t >= 1.0:
            raise ValueError(f"mv_t must be >= 1, got {self.mv_t}")


@dataclass(frozen=True)
class LossGrads:
    f: np.ndarray
    W: np.ndarray


@dataclass(frozen=True)
class BatchLoss:
    """Per-row losses plus gradients of sum(weights * losses)."""

    losses: np.ndarray
    dF: np.ndarray
    dW: np.ndarray


def _checked_cosines(F: np.ndarray, W: np.ndarray) -> np.ndarray:
    cos = F @ W.T
    if np.any(np.abs(cos) > 1.0 + COS_TOLERANCE):
        worst = float(np.max(np.abs(cos)))
        raise MarginDomainError(f"cosine {worst:.8f} outside [-1, 1]; are embeddings and head rows unit norm?")
    return np.clip(cos, -1.0 + COS_CLAMP, 1.0 - COS_CLAMP)


def margin_logits(
    cos: np.ndarray, y: np.ndarray, cfg: MarginConfig, t: float | np.ndarray = 1.0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Logits for a batch of clamped cosines (B, C).

    Returns (z, hard, phi): the (B, C) logits, the hard-negative mask and cos(theta_y + m) per row.
    """
    B = cos.shape[0]
    rows = np.arange(B)
    t_rows = np.broadcast_to(np.asarray(t, dtype=np.float64), (B,))[:, None]
    cos_y = cos[rows, y]
    phi = cos_y * math.cos(cfg.margin) - np.sqrt(1.0 - cos_y**2) * math.sin(cfg.margin)

    hard = cos > phi[:, None]
    hard[rows, y] = False
    z = np.where(hard, t_rows * cos + (t_rows - 1.0), cos)
    z[rows, y] = phi
    return cfg.scale * z, hard, phi


def margin_softmax(
    F: np.ndarray,
    W: np.ndarray,
    y: np.ndarray,
    cfg: MarginConfig,
    t: float | np.ndarray = 1.0,
    weights: Optional[np.ndarray] = None,
) -> BatchLoss:
    """Margin softmax losses for a batch of unit embeddings F (B, d_e) against head W (C, d_e)."""
    y = np.asarray(y, dtype=np.int64)
    B = F.shape[0]
    if np.any(y < 0) or np.any(y >= W.shape[0]):
        raise ValueError(f"labels must be in [0, {W.shape[0]})")
    cos = _checked_cosines(F, W)
    z, hard, _ = margin_logits(cos, y, cfg, t)
    rows = np.arange(B)
    losses = logsumexp(z, axis=1) - z[rows, y]

    w = np.ones(B) if weights is None else np.asarray(weights, dtype=np.float64)
    dz = softmax(z, axis=1)
    dz[rows, y] -= 1.0
    dz *= w[:, None]

    t_rows = np.broadcast_to(np.asarray(t, dtype=np.float64), (B,))[:, None]
    dcos = cfg.scale * dz * np.where(hard, t_rows, 1.0)
    cos_y = cos[rows, y]
    dphi = math.cos(cfg.margin) + math.sin(cfg.margin) * cos_y / np.sqrt(1.0 - cos_y**2)
    dcos[rows, y] = cfg.scale * dz[rows, y] * dphi

    return BatchLoss(losses=losses, dF=dcos @ W, dW=dcos.T @ F)


def _single(f: np.ndarray, head: ClassHead, y: int, cfg: MarginConfig, t: float) -> tuple[float, LossGrads]:
    f = np.asarray(f, dtype=np.float64)
    if not 0 <= y < head.num_classes:
        raise ValueError(f"class id {y} out of range for {head.num_classes} classes")
    out = margin_softmax(f[None, :], head.W, np.array([y]), cfg, t)
    return float(out.losses[0]), LossGrads(f=out.dF[0], W=out.dW)


def arc_softmax_loss(f: np.ndarray, head: ClassHead, y: int, cfg: MarginConfig) -> tuple[float, LossGrads]:
    return _single(f, head, y, cfg, 1.0)


def mv_softmax_loss(f: np.ndarray, head: ClassHead, y: int, cfg: MarginConfig) -> tuple[float, LossGrads]:
    return _single(f, head, y, cfg, cfg.mv_t)


def forward_cosines(F: np.ndarray, head: ClassHead, cfg: MarginConfig) -> tuple[np.ndarray, np.ndarray]:
    """Cosines and softmax posteriors over s * cos, no margin. Works on (d_e,) or (B, d_e)."""
    cos = np.clip(np.asarray(F) @ head.W.T, -1.0, 1.0)
    return cos, softmax(cfg.scale * cos, axis=-1)
