import numpy as np
import pytest

from nroll.errors import CheckpointError
from nroll.learner import MarginConfig, init_model, load_checkpoint, save_checkpoint
from nroll.learner.checkpoint import MAGIC, decode_checkpoint, encode_checkpoint

pytestmark = [pytest.mark.unit]


def test_round_trip_through_float32(tmp_path):
    params = init_model([5, 7, 3], 4, np.random.default_rng(0))
    margin = MarginConfig(margin=0.3, scale=16.0)
    path = save_checkpoint(tmp_path / "loop_0" / "agent_0.gnckpt", params, margin)
    loaded, header = load_checkpoint(path)
    assert header.layer_sizes == (5, 7, 3)
    assert header.num_classes == 4 and header.embed_dim == 3
    assert header.margin == margin
    for name, w in params.tensors().items():
        assert np.array_equal(loaded.tensors()[name], w.astype(np.float32).astype(np.float64))


def test_layout():
    params = init_model([2, 3], 2, np.random.default_rng(1))
    data = encode_checkpoint(params, MarginConfig())
    assert data.startswith(MAGIC)
    header_end = data.index(b"\n", len(MAGIC))
    body = data[header_end + 1:]
    # W0 (2x3) + b0 (3) + head (2x3), float32
    assert len(body) == (6 + 3 + 6) * 4
    assert np.frombuffer(body[:24], dtype="<f4").reshape(2, 3).tolist() == params.encoder.weights[0].astype(np.float32).tolist()


def test_rejects_bad_magic():
    with pytest.raises(CheckpointError):
        decode_checkpoint(b"NOTACKPT\n{}\n")


def test_rejects_truncated_body():
    data = encode_checkpoint(init_model([2, 3], 2, np.random.default_rng(2)), MarginConfig())
    with pytest.raises(CheckpointError, match="tensor bytes"):
        decode_checkpoint(data[:-4])
