"""An encoder plus class head, and the agent that owns one."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .encoder import EncoderParams, backward, forward, init_encoder
from .head import ClassHead, init_head
from .losses import BatchLoss, MarginConfig, forward_cosines, margin_softmax
from .optim import MomentumState, SgdConfig, sgd_update


@dataclass(frozen=True)
class ModelParams:
    encoder: EncoderParams
    head: ClassHead

    def tensors(self) -> dict[str, np.ndarray]:
        out = self.encoder.tensors()
        out["head"] = self.head.W
        return out

    @classmethod
    def from_tensors(cls, tensors: dict[str, np.ndarray]) -> "ModelParams":
        enc = {k: v for k, v in tensors.items() if k != "head"}
        return cls(EncoderParams.from_tensors(enc), ClassHead(tensors["head"]))

    @property
    def num_classes(self) -> int:
        return self.head.num_classes


def init_model(layer_sizes: Sequence[int], num_classes: int, rng: np.random.Generator) -> ModelParams:
    encoder = init_encoder(layer_sizes, rng)
    return ModelParams(encoder, init_head(num_classes, encoder.embed_dim, rng))


@dataclass(frozen=True)
class ModelLoss:
    losses: np.ndarray
    grads: ModelParams


def loss_and_grads(
    params: ModelParams,
    X: np.ndarray,
    y: np.ndarray,
    cfg: MarginConfig,
    t: float | np.ndarray = 1.0,
    weights: Optional[np.ndarray] = None,
) -> ModelLoss:
    """Per-row margin losses and gradients of sum(weights * losses) for every tensor."""
    F, cache = forward(params.encoder, X)
    out: BatchLoss = margin_softmax(F, params.head.W, y, cfg, t, weights)
    return ModelLoss(out.losses, ModelParams(backward(params.encoder, cache, out.dF), ClassHead(out.dW)))


def per_sample_losses(params: ModelParams, X: np.ndarray, y: np.ndarray, cfg: MarginConfig) -> np.ndarray:
    """Arc-softmax loss per row with the margin applied; used to rank a batch."""
    F, _ = forward(params.encoder, X)
    return margin_softmax(F, params.head.W, y, cfg, 1.0).losses


def forward_logits(
    params: ModelParams, x: np.ndarray, cfg: MarginConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Cosine and posterior vectors over the C classes for x (d_in,) or a batch (B, d_in)."""
    x = np.asarray(x, dtype=np.float64)
    F, _ = forward(params.encoder, np.atleast_2d(x))
    cos, post = forward_cosines(F, params.head, cfg)
    if x.ndim == 1:
        return cos[0], post[0]
    return cos, post


def predict(params: ModelParams, X: np.ndarray, cfg: MarginConfig) -> np.ndarray:
    cos, _ = forward_logits(params, np.atleast_2d(X), cfg)
    return np.argmax(cos, axis=1)


@dataclass
class Agent:
    """One peer network: its parameters, its optimizer state and the seed that initialised it."""

    index: int
    params: ModelParams
    seed: int
    momentum: MomentumState = field(default_factory=MomentumState)

    @classmethod
    def create(cls, index: int, layer_sizes: Sequence[int], num_classes: int, seed: int) -> "Agent":
        rng = np.random.default_rng(seed)
        return cls(index=index, params=init_model(layer_sizes, num_classes, rng), seed=seed)

    def embed(self, X: np.ndarray) -> np.ndarray:
        F, _ = forward(self.params.encoder, np.atleast_2d(X))
        return F

    def grow_head(self, rows: np.ndarray) -> None:
        """Append class rows (new identities); their momentum starts at zero."""
        self.params = replace(self.params, head=self.params.head.with_rows(rows))
        self.momentum.pad_rows("head", np.atleast_2d(rows).shape[0])


def sgd_step(
    params: ModelParams, grads: ModelParams, cfg: SgdConfig, state: MomentumState, lr: float | None = None
) -> ModelParams:
    """Update every tensor from its gradient, then renormalise the head rows."""
    updated = ModelParams.from_tensors(sgd_update(params.tensors(), grads.tensors(), cfg, state, lr))
    return ModelParams(updated.encoder, updated.head.renormalized())
