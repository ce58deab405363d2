import numpy as np
import pytest

from nroll.errors import NumericOverflowError
from nroll.learner import EncoderParams, embed, embed_batch, identity_encoder, init_encoder
from nroll.learner.encoder import backward, forward

pytestmark = [pytest.mark.unit]


class TestEmbed:
    def test_identity_encoder_unit_input(self):
        f = embed(identity_encoder(2), np.array([3.0, 4.0]) / 5.0)
        assert np.allclose(f, [0.6, 0.8], atol=1e-12)

    def test_output_is_normalised(self):
        f = embed(identity_encoder(3), np.array([3.0, 0.0, 4.0]))
        assert np.allclose(f, [0.6, 0.0, 0.8])
        assert abs(np.linalg.norm(f) - 1.0) < 1e-6

    def test_matches_matrix_multiply_oracle(self):
        params = init_encoder([8, 16, 4], np.random.default_rng(0))
        x = np.zeros(8)
        x[0] = 1.0
        W0, W1 = params.weights
        b0, b1 = params.biases
        v = np.maximum(x @ W0 + b0, 0.0) @ W1 + b1
        assert np.allclose(embed(params, x), v / np.linalg.norm(v), atol=1e-12)

    def test_random_batch_norms(self):
        rng = np.random.default_rng(3)
        params = init_encoder([32, 64, 16], rng)
        F = embed_batch(params, rng.normal(size=(200, 32)))
        assert np.allclose(np.linalg.norm(F, axis=1), 1.0, atol=1e-6)

    def test_deterministic(self):
        p1 = init_encoder([5, 7, 3], np.random.default_rng(11))
        p2 = init_encoder([5, 7, 3], np.random.default_rng(11))
        x = np.arange(5.0)
        assert np.array_equal(embed(p1, x), embed(p2, x))

    def test_overflow(self):
        params = EncoderParams((np.full((2, 2), 1e200),), (np.zeros(2),))
        with pytest.raises(NumericOverflowError, match="numeric overflow"):
            embed(params, np.array([1e200, 1e200]))

    def test_zero_output_is_overflow(self):
        with pytest.raises(NumericOverflowError):
            embed(identity_encoder(2), np.zeros(2))

    def test_wrong_dimension(self):
        with pytest.raises(ValueError):
            embed(identity_encoder(2), np.ones(3))


class TestBackward:
    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        params = init_encoder([4, 6, 3], rng)
        X = rng.normal(size=(5, 4))
        G = rng.normal(size=(5, 3))

        def objective(p: EncoderParams) -> float:
            F, _ = forward(p, X)
            return float(np.sum(F * G))

        F, cache = forward(params, X)
        grads = backward(params, cache, G).tensors()
        tensors = params.tensors()
        h = 1e-6
        for name, w in tensors.items():
            for idx in np.ndindex(w.shape):
                plus = {k: v.copy() for k, v in tensors.items()}
                minus = {k: v.copy() for k, v in tensors.items()}
                plus[name][idx] += h
                minus[name][idx] -= h
                numeric = (objective(EncoderParams.from_tensors(plus)) - objective(EncoderParams.from_tensors(minus))) / (2 * h)
                assert abs(numeric - grads[name][idx]) < 1e-5 * max(1.0, abs(numeric))
