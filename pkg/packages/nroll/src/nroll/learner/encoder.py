"""
MLP encoder producing unit-norm embeddings.

Layer l computes `a @ W_l + b_l` with W_l of shape (fan_in, fan_out); ReLU sits between
layers and the last layer is linear. The output row v is normalised to f = v / |v|.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import NumericOverflowError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EncoderParams:
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.weights) == 0:
            raise ValueError("encoder needs at least one layer")
        if len(self.weights) != len(self.biases):
            raise ValueError(f"{len(self.weights)} weight matrices but {len(self.biases)} bias vectors")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError(f"layer {i}: weight {w.shape} and bias {b.shape} are inconsistent")
            if i > 0 and self.weights[i - 1].shape[1] != w.shape[0]:
                raise ValueError(f"layer {i}: fan_in {w.shape[0]} != previous fan_out {self.weights[i - 1].shape[1]}")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    @property
    def d_in(self) -> int:
        return self.weights[0].shape[0]

    @property
    def embed_dim(self) -> int:
        return self.weights[-1].shape[1]

    def tensors(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            out[f"W{i}"] = w
            out[f"b{i}"] = b
        return out

    @classmethod
    def from_tensors(cls, tensors: dict[str, np.ndarray]) -> "EncoderParams":
        n = sum(1 for k in tensors if k.startswith("W"))
        return cls(
            weights=tuple(tensors[f"W{i}"] for i in range(n)),
            biases=tuple(tensors[f"b{i}"] for i in range(n)),
        )


@dataclass
class EncoderCache:
    inputs: list[np.ndarray]  # input to each layer
    pre: list[np.ndarray]  # pre-activation of each layer
    norms: np.ndarray  # |v| per row, shape (B, 1)
    out: np.ndarray  # unit embeddings F


def init_encoder(layer_sizes: Sequence[int], rng: np.random.Generator) -> EncoderParams:
    """He-initialised MLP with the given layer sizes (d_in, hidden..., d_e)."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ValueError(f"invalid layer sizes {sizes}")
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return EncoderParams(tuple(weights), tuple(biases))


def identity_encoder(d: int) -> EncoderParams:
    return EncoderParams((np.eye(d),), (np.zeros(d),))


def _check_finite(a: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(a)):
        raise NumericOverflowError(where)


def forward(params: EncoderParams, X: np.ndarray) -> tuple[np.ndarray, EncoderCache]:
    """Embed a batch (B, d_in) into unit rows (B, d_e)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != params.d_in:
        raise ValueError(f"expected inputs of dimension {params.d_in}, got {X.shape[1]}")
    _check_finite(X, "encoder input")

    inputs: list[np.ndarray] = []
    pre: list[np.ndarray] = []
    a = X
    last = len(params.weights) - 1
    with np.errstate(all="ignore"):
        for i, (w, b) in enumerate(zip(params.weights, params.biases)):
            inputs.append(a)
            z = a @ w + b
            _check_finite(z, f"encoder layer {i}")
            pre.append(z)
            a = z if i == last else np.maximum(z, 0.0)
        norms = np.linalg.norm(a, axis=1, keepdims=True)
        F = a / norms
    _check_finite(F, "embedding normalisation")
    return F, EncoderCache(inputs=inputs, pre=pre, norms=norms, out=F)


def backward(params: EncoderParams, cache: EncoderCache, dF: np.ndarray) -> EncoderParams:
    """Gradients of the encoder tensors given dL/dF; returned in the EncoderParams layout."""
    F = cache.out
    # gradient through f = v / |v|
    dz = (dF - F * np.sum(F * dF, axis=1, keepdims=True)) / cache.norms
    n = len(params.weights)
    dWs: list[np.ndarray] = [np.empty(0)] * n
    dbs: list[np.ndarray] = [np.empty(0)] * n
    for i in range(n - 1, -1, -1):
        dWs[i] = cache.inputs[i].T @ dz
        dbs[i] = dz.sum(axis=0)
        if i > 0:
            dz = (dz @ params.weights[i].T) * (cache.pre[i - 1] > 0)
    return EncoderParams(tuple(dWs), tuple(dbs))


def embed(params: EncoderParams, x: np.ndarray) -> np.ndarray:
    """Unit-norm embedding of one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"embed takes one vector, got shape {x.shape}")
    F, _ = forward(params, x[None, :])
    return F[0]


def embed_batch(params: EncoderParams, X: np.ndarray) -> np.ndarray:
    F, _ = forward(params, X)
    return F
