"""SGD with momentum and weight decay, and the step learning-rate schedule."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..errors import DivergedError


@dataclass(frozen=True)
class SgdConfig:
    lr: float = 0.1
    momentum: float = 0.9
    weight_decay: float = 0.0005
    # fractions of the iterations of one training call at which lr is multiplied by decay_factor
    decay_at: tuple[float, ...] = (0.6, 0.8)
    decay_factor: float = 0.1

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        if not (0.0 <= self.momentum < 1.0):
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if not self.weight_decay >= 0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if any(not (0.0 < f < 1.0) for f in self.decay_at) or list(self.decay_at) != sorted(self.decay_at):
            raise ValueError(f"decay_at must be increasing fractions in (0, 1), got {self.decay_at}")
        if not (0.0 < self.decay_factor <= 1.0):
            raise ValueError(f"decay_factor must be in (0, 1], got {self.decay_factor}")

    def lr_at(self, iteration: int, total: int) -> float:
        if total <= 0:
            return self.lr
        drops = bisect.bisect_right([f * total for f in self.decay_at], iteration)
        return self.lr * self.decay_factor**drops


@dataclass
class MomentumState:
    velocity: dict[str, np.ndarray] = field(default_factory=dict)

    def reset(self) -> None:
        self.velocity.clear()

    def pad_rows(self, name: str, n: int) -> None:
        v = self.velocity.get(name)
        if v is not None:
            self.velocity[name] = np.vstack([v, np.zeros((n, v.shape[1]))])


def sgd_update(
    tensors: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    cfg: SgdConfig,
    state: MomentumState,
    lr: float | None = None,
) -> dict[str, np.ndarray]:
    """
    One momentum step on named tensors: v <- mu*v + g + wd*w; w <- w - lr*v.

    `lr` overrides cfg.lr (the schedule passes the current value; 0 is allowed).
    """
    lr = cfg.lr if lr is None else lr
    out: dict[str, np.ndarray] = {}
    for name, w in tensors.items():
        g = np.asarray(grads[name], dtype=np.float64)
        if g.shape != w.shape:
            raise ValueError(f"gradient for {name} has shape {g.shape}, expected {w.shape}")
        if not np.all(np.isfinite(g)):
            raise DivergedError(f"non-finite gradient for {name}")
        v = state.velocity.get(name)
        v = g + cfg.weight_decay * w if v is None else cfg.momentum * v + g + cfg.weight_decay * w
        state.velocity[name] = v
        new = w - lr * v
        if not np.all(np.isfinite(new)):
            raise DivergedError(f"non-finite parameter {name}")
        out[name] = new
    return out
