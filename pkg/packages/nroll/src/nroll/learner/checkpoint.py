"""
Agent checkpoint files.

Layout: the magic line b"GNCKPT1\\n", one JSON header line, then every tensor as row-major
little-endian float32 in declaration order (W0, b0, W1, b1, ..., head).
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from nrollpyutils.file_utils import write_bytes_atomic

from ..errors import CheckpointError
from .losses import MarginConfig
from .model import ModelParams

log = logging.getLogger(__name__)

MAGIC = b"GNCKPT1\n"
_DTYPE = np.dtype("<f4")


@dataclass(frozen=True)
class CheckpointHeader:
    layer_sizes: tuple[int, ...]
    num_classes: int
    embed_dim: int
    margin: MarginConfig


def _tensor_order(n_layers: int) -> list[str]:
    names = []
    for i in range(n_layers):
        names += [f"W{i}", f"b{i}"]
    return names + ["head"]


def encode_checkpoint(params: ModelParams, margin: MarginConfig) -> bytes:
    sizes = params.encoder.layer_sizes
    header = {
        "layer_sizes": list(sizes),
        "num_classes": params.num_classes,
        "embed_dim": params.encoder.embed_dim,
        "margin": asdict(margin),
    }
    tensors = params.tensors()
    chunks = [MAGIC, json.dumps(header, sort_keys=True).encode("utf-8") + b"\n"]
    for name in _tensor_order(len(sizes) - 1):
        chunks.append(np.ascontiguousarray(tensors[name], dtype=_DTYPE).tobytes(order="C"))
    return b"".join(chunks)


def decode_checkpoint(data: bytes, source: str = "<bytes>") -> tuple[ModelParams, CheckpointHeader]:
    if not data.startswith(MAGIC):
        raise CheckpointError(f"{source}: not a GNCKPT1 checkpoint")
    end = data.find(b"\n", len(MAGIC))
    if end < 0:
        raise CheckpointError(f"{source}: truncated header")
    try:
        raw = json.loads(data[len(MAGIC):end].decode("utf-8"))
        header = CheckpointHeader(
            layer_sizes=tuple(int(s) for s in raw["layer_sizes"]),
            num_classes=int(raw["num_classes"]),
            embed_dim=int(raw["embed_dim"]),
            margin=MarginConfig(**raw["margin"]),
        )
    except (ValueError, KeyError, TypeError) as e:
        raise CheckpointError(f"{source}: bad header: {e}") from e

    sizes = header.layer_sizes
    shapes: dict[str, tuple[int, ...]] = {}
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        shapes[f"W{i}"] = (fan_in, fan_out)
        shapes[f"b{i}"] = (fan_out,)
    shapes["head"] = (header.num_classes, header.embed_dim)

    body = memoryview(data)[end + 1:]
    expected = sum(int(np.prod(s)) for s in shapes.values()) * _DTYPE.itemsize
    if len(body) != expected:
        raise CheckpointError(f"{source}: expected {expected} tensor bytes, found {len(body)}")

    tensors: dict[str, np.ndarray] = {}
    offset = 0
    for name in _tensor_order(len(sizes) - 1):
        count = int(np.prod(shapes[name]))
        arr = np.frombuffer(body, dtype=_DTYPE, count=count, offset=offset)
        tensors[name] = arr.astype(np.float64).reshape(shapes[name])
        offset += count * _DTYPE.itemsize
    return ModelParams.from_tensors(tensors), header


def save_checkpoint(path: str | Path, params: ModelParams, margin: MarginConfig) -> Path:
    p = Path(path)
    write_bytes_atomic(p, encode_checkpoint(params, margin))
    log.debug("wrote checkpoint %s", p)
    return p


def load_checkpoint(path: str | Path) -> tuple[ModelParams, CheckpointHeader]:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {p}: {e}") from e
    return decode_checkpoint(data, str(p))
