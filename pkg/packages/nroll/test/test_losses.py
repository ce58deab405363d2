import math

import numpy as np
import pytest

from nroll.errors import MarginDomainError
from nroll.learner import (
    ClassHead,
    MarginConfig,
    arc_softmax_loss,
    forward_cosines,
    margin_logits,
    mv_softmax_loss,
    normalize_rows,
)

pytestmark = [pytest.mark.unit]


def _unit(v):
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)


def _random_point(rng, C=5, d=4):
    f = _unit(rng.normal(size=d))
    W = normalize_rows(rng.normal(size=(C, d)))
    y = int(rng.integers(C))
    return f, ClassHead(W), y


class TestMarginConfig:
    def test_defaults(self):
        cfg = MarginConfig()
        assert (cfg.margin, cfg.scale, cfg.mv_t) == (0.5, 32.0, 1.1)

    @pytest.mark.parametrize("kwargs", [{"margin": -0.1}, {"margin": math.pi / 2}, {"scale": 0.0}, {"mv_t": 0.9}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            MarginConfig(**kwargs)


class TestArcSoftmax:
    def test_two_class_no_margin(self):
        head = ClassHead(np.array([[1.0, 0.0], [-1.0, 0.0]]))
        loss, _ = arc_softmax_loss(np.array([1.0, 0.0]), head, 0, MarginConfig(margin=0.0, scale=1.0))
        assert loss == pytest.approx(math.log(1 + math.exp(-2)), abs=1e-6)
        assert loss == pytest.approx(0.126928, abs=1e-6)

    def test_margin_example(self):
        f = np.array([1.0, 0.0])
        head = ClassHead(np.array([[0.8, 0.6], [0.5, -math.sqrt(0.75)]]))
        loss, _ = arc_softmax_loss(f, head, 0, MarginConfig())
        phi = math.cos(math.acos(0.8) + 0.5)
        expected = math.log(1 + math.exp(32 * (0.5 - phi)))
        assert loss == pytest.approx(expected, rel=1e-9)
        assert loss == pytest.approx(2.83, abs=0.05)

    def test_zero_margin_is_normalised_softmax_cross_entropy(self):
        rng = np.random.default_rng(1)
        cfg = MarginConfig(margin=0.0)
        for _ in range(50):
            f, head, y = _random_point(rng)
            loss, _ = arc_softmax_loss(f, head, y, cfg)
            _, post = forward_cosines(f, head, cfg)
            assert loss == pytest.approx(-math.log(post[y]), rel=1e-6, abs=1e-9)

    def test_cosine_out_of_range(self):
        head = ClassHead(np.array([[1.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(MarginDomainError):
            arc_softmax_loss(np.array([2.0, 0.0]), head, 0, MarginConfig())

    def test_label_out_of_range(self):
        head = ClassHead(np.eye(2))
        with pytest.raises(ValueError):
            arc_softmax_loss(np.array([1.0, 0.0]), head, 2, MarginConfig())


class TestMvSoftmax:
    def test_t_one_equals_arc(self):
        rng = np.random.default_rng(2)
        cfg = MarginConfig(mv_t=1.0)
        for _ in range(1000):
            f, head, y = _random_point(rng)
            a, ga = arc_softmax_loss(f, head, y, cfg)
            m, gm = mv_softmax_loss(f, head, y, cfg)
            assert abs(a - m) <= 1e-10
            assert np.allclose(ga.f, gm.f, atol=1e-10) and np.allclose(ga.W, gm.W, atol=1e-10)

    def test_mv_never_below_arc(self):
        rng = np.random.default_rng(3)
        cfg = MarginConfig()
        for _ in range(1000):
            f, head, y = _random_point(rng)
            assert mv_softmax_loss(f, head, y, cfg)[0] >= arc_softmax_loss(f, head, y, cfg)[0] - 1e-12

    def test_hard_negative_logit(self):
        cfg = MarginConfig()
        cos_y = math.cos(math.acos(0.41) - cfg.margin)
        cos = np.array([[cos_y, 0.5, 0.3]])
        z, hard, phi = margin_logits(cos, np.array([0]), cfg, cfg.mv_t)
        assert phi[0] == pytest.approx(0.41, abs=1e-12)
        assert hard.tolist() == [[False, True, False]]
        assert z[0, 1] == pytest.approx(cfg.scale * 0.65)
        assert z[0, 2] == pytest.approx(cfg.scale * 0.3)


@pytest.mark.parametrize("which", ["arc", "mv"])
def test_gradients_match_finite_differences(which):
    rng = np.random.default_rng(17)
    cfg = MarginConfig()
    fn = arc_softmax_loss if which == "arc" else mv_softmax_loss
    h = 1e-5
    checked = 0
    worst = 0.0
    while checked < 100:
        f, head, y = _random_point(rng)
        cos = head.W @ f
        phi = math.cos(math.acos(cos[y]) + cfg.margin)
        others = np.delete(cos, y)
        if np.any(np.abs(others - phi) < 1e-3) or np.any(np.abs(cos) > 0.999):
            continue
        checked += 1
        _, grads = fn(f, head, y, cfg)

        for i in range(f.size):
            fp, fm = f.copy(), f.copy()
            fp[i] += h
            fm[i] -= h
            numeric = (fn(fp, head, y, cfg)[0] - fn(fm, head, y, cfg)[0]) / (2 * h)
            worst = max(worst, abs(numeric - grads.f[i]) / max(abs(numeric), abs(grads.f[i]), 1e-2))
        for idx in np.ndindex(head.W.shape):
            Wp, Wm = head.W.copy(), head.W.copy()
            Wp[idx] += h
            Wm[idx] -= h
            numeric = (fn(f, ClassHead(Wp), y, cfg)[0] - fn(f, ClassHead(Wm), y, cfg)[0]) / (2 * h)
            worst = max(worst, abs(numeric - grads.W[idx]) / max(abs(numeric), abs(grads.W[idx]), 1e-2))
    assert worst < 1e-4


class TestForwardCosines:
    def test_posterior_example(self):
        f = np.array([1.0, 0.0])
        head = ClassHead(np.array([[0.9, math.sqrt(0.19)], [0.1, math.sqrt(0.99)], [-0.5, math.sqrt(0.75)]]))
        cos, post = forward_cosines(f, head, MarginConfig())
        assert np.allclose(cos, [0.9, 0.1, -0.5])
        assert post[0] > 0.999

    def test_posterior_sums_to_one(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            f, head, _ = _random_point(rng)
            _, post = forward_cosines(f, head, MarginConfig())
            assert abs(post.sum() - 1.0) < 1e-9
