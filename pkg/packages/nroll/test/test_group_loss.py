import numpy as np
import pytest

from nroll.errors import EmptyEffectiveBatch
from nroll.groupnet import combine_group_losses, group_loss
from nroll.learner import MarginConfig, arc_softmax_loss, init_model, loss_and_grads, mv_softmax_loss
from nroll.learner.encoder import forward

pytestmark = [pytest.mark.unit]


def _setup(seed=0, n=12):
    rng = np.random.default_rng(seed)
    params = init_model([6, 8], 4, rng)
    return params, rng.normal(size=(n, 6)), rng.integers(4, size=n)


def _per_sample(fn, params, X, y, cfg):
    F, _ = forward(params.encoder, X)
    return np.array([fn(F[i], params.head, int(y[i]), cfg)[0] for i in range(len(y))])


class TestCombine:
    def test_balanced_mean(self):
        assert combine_group_losses(np.array([1.0, 1.0]), np.array([3.0, 3.0])) == pytest.approx(2.0)

    def test_uneven_sizes(self):
        assert combine_group_losses(np.array([1.0]), np.array([4.0, 4.0, 4.0])) == pytest.approx(3.25)

    def test_empty(self):
        with pytest.raises(EmptyEffectiveBatch):
            combine_group_losses(np.array([]), np.array([]))


class TestGroupLoss:
    def test_no_mc_is_mean_mv(self):
        params, X, y = _setup()
        cfg = MarginConfig()
        gl = group_loss(0, params, X, y, X[:0], y[:0], cfg)
        assert gl.loss == pytest.approx(_per_sample(mv_softmax_loss, params, X, y, cfg).mean(), rel=1e-9)
        assert (gl.hc_size, gl.mc_size) == (12, 0)

    def test_no_hc_is_mean_arc(self):
        params, X, y = _setup(1)
        cfg = MarginConfig()
        gl = group_loss(2, params, X[:0], y[:0], X, y, cfg)
        assert gl.loss == pytest.approx(_per_sample(arc_softmax_loss, params, X, y, cfg).mean(), rel=1e-9)

    def test_unit_t_reduces_to_arc(self):
        params, X, y = _setup(2)
        cfg = MarginConfig(mv_t=1.0)
        gl = group_loss(0, params, X[:5], y[:5], X[5:], y[5:], cfg)
        ref = loss_and_grads(params, X, y, cfg, weights=np.full(12, 1 / 12))
        assert gl.loss == pytest.approx(ref.losses.mean(), rel=1e-12)
        for name, g in gl.grads.tensors().items():
            assert np.allclose(g, ref.grads.tensors()[name])

    def test_mixed_sum(self):
        params, X, y = _setup(3)
        cfg = MarginConfig()
        gl = group_loss(0, params, X[:7], y[:7], X[7:], y[7:], cfg)
        hc = _per_sample(mv_softmax_loss, params, X[:7], y[:7], cfg)
        mc = _per_sample(arc_softmax_loss, params, X[7:], y[7:], cfg)
        assert gl.loss == pytest.approx((hc.sum() + mc.sum()) / 12, rel=1e-9)

    def test_empty_effective_batch(self):
        params, X, y = _setup()
        with pytest.raises(EmptyEffectiveBatch, match="agent 3"):
            group_loss(3, params, X[:0], y[:0], X[:0], y[:0], MarginConfig())
