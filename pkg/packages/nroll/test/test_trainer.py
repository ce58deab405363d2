from dataclasses import replace

import numpy as np
import pytest

from nroll.datasets import LabelledSet, gen_synthetic, inject_noise
from nroll.groupnet import GroupConfig, gn_train, init_agents
from nroll.learner import Agent, MarginConfig, SgdConfig, predict

pytestmark = [pytest.mark.unit]

LAYERS = [8, 16, 8]


def _data(seed=0, rate=0.0):
    data = gen_synthetic(classes=5, per_class=30, d_in=8, intra_spread=0.1, seed=seed)
    return inject_noise(data, rate, seed=seed + 1) if rate else data


def _cfg(**kw):
    base = GroupConfig(
        agents=3,
        alpha=1,
        r_percent=20.0,
        batch_size=20,
        margin=MarginConfig(margin=0.2, scale=8.0),
        sgd=SgdConfig(lr=0.01, momentum=0.9, weight_decay=0.0005),
        workers=1,
    )
    return replace(base, **kw)


def _logs(result):
    return [r.to_json() for r in result.records]


def _same_params(a, b):
    ta, tb = a.params.tensors(), b.params.tensors()
    return ta.keys() == tb.keys() and all(np.array_equal(ta[k], tb[k]) for k in ta)


class TestDeterminism:
    def test_rerun_is_bit_identical(self):
        data, cfg = _data(rate=0.3), _cfg(workers=2)
        first = gn_train(init_agents(cfg, LAYERS, 5), data, cfg, 30)
        second = gn_train(init_agents(cfg, LAYERS, 5), data, cfg, 30)
        assert _logs(first) == _logs(second)
        assert all(_same_params(a, b) for a, b in zip(first.agents, second.agents))

    def test_identical_agents_stay_identical(self):
        cfg = _cfg(alpha=2, shuffle=False)
        agents = [Agent.create(m, LAYERS, 5, seed=42) for m in range(3)]
        gn_train(agents, _data(rate=0.2), cfg, 25)
        assert _same_params(agents[0], agents[1]) and _same_params(agents[1], agents[2])

    def test_full_exchange_ignores_shuffle(self):
        data = _data(rate=0.2)
        on, off = _cfg(alpha=2, shuffle=True), _cfg(alpha=2, shuffle=False)
        a = gn_train(init_agents(on, LAYERS, 5), data, on, 25)
        b = gn_train(init_agents(off, LAYERS, 5), data, off, 25)
        assert _logs(a) == _logs(b)

    def test_shuffled_seating_is_a_permutation(self):
        cfg = _cfg(agents=4, alpha=1, batch_size=24)
        result = gn_train(init_agents(cfg, LAYERS, 5), _data(), cfg, 20)
        perms = [r.permutation for r in result.records if not r.warmup]
        assert all(sorted(p) == [0, 1, 2, 3] for p in perms)
        assert len({tuple(p) for p in perms}) > 1


class TestRecords:
    def test_zero_rate_uses_whole_batch(self):
        cfg = _cfg(r_percent=0.0)
        result = gn_train(init_agents(cfg, LAYERS, 5), _data(), cfg, 20)
        for rec in result.records:
            assert rec.hc == 20 and rec.mc_ms == [0, 0, 0]

    def test_partition_sizes(self):
        cfg = _cfg(r_percent=25.0)
        result = gn_train(init_agents(cfg, LAYERS, 5), _data(), cfg, 20)
        for rec in result.records[2:]:
            assert not rec.warmup
            assert 5 <= rec.hc <= 15
            assert all(v >= 0 for v in rec.mc_ms)
            assert rec.events == []

    def test_warmup_hook(self):
        cfg = _cfg(r_percent=0.0)
        seen = []

        def hook(agents):
            seen.append(len(agents))
            return 25.0

        result = gn_train(init_agents(cfg, LAYERS, 5), _data(), cfg, 30, on_warmup_end=hook)
        assert seen == [3]
        assert [r.warmup for r in result.records[:4]] == [True, True, True, False]
        assert all(r.r_percent == 25.0 for r in result.records[3:])
        assert result.r_percent == 25.0

    def test_warmup_hook_fires_once_on_short_runs(self):
        cfg = _cfg(warmup_fraction=0.5)
        seen = []
        gn_train(init_agents(cfg, LAYERS, 5), _data(), cfg, 1, on_warmup_end=lambda a: seen.append(1) or 10.0)
        assert seen == [1]

    def test_noise_diagnostics(self):
        cfg = _cfg()
        noisy = gn_train(init_agents(cfg, LAYERS, 5), _data(rate=0.4), cfg, 10)
        assert all(0.0 <= r.batch_noise <= 1.0 for r in noisy.records)
        data = _data()
        blind = LabelledSet.create(data.ids, data.features, data.labels)
        result = gn_train(init_agents(cfg, LAYERS, 5), blind, cfg, 10)
        assert all(r.batch_noise is None and r.hc_noise is None for r in result.records)

    def test_high_confidence_set_is_cleaner_than_batch(self):
        data = inject_noise(gen_synthetic(classes=10, per_class=40, d_in=8, intra_spread=0.1, seed=3), 0.4, seed=4)
        cfg = _cfg(alpha=2, r_percent=40.0, batch_size=64)
        result = gn_train(init_agents(cfg, LAYERS, data.num_classes), data, cfg, 300)
        after = [r for r in result.records if not r.warmup and r.hc_noise is not None]
        assert len(after) > 100
        batch = np.mean([r.batch_noise for r in after])
        hc = np.mean([r.hc_noise for r in after])
        assert batch == pytest.approx(0.4, abs=0.05)
        assert hc < batch - 0.15

    def test_on_record_streams_every_iteration(self):
        cfg = _cfg()
        streamed = []
        result = gn_train(init_agents(cfg, LAYERS, 5), _data(), cfg, 12, on_record=streamed.append)
        assert [r.iteration for r in streamed] == list(range(12))
        assert streamed == result.records


class TestValidation:
    def test_agent_count_mismatch(self):
        cfg = _cfg()
        with pytest.raises(ValueError, match="agents"):
            gn_train(init_agents(cfg, LAYERS, 5)[:2], _data(), cfg, 5)

    def test_class_count_mismatch(self):
        cfg = _cfg()
        with pytest.raises(ValueError, match="classes"):
            gn_train(init_agents(cfg, LAYERS, 7), _data(), cfg, 5)

    @pytest.mark.parametrize("kw", [{"agents": 1}, {"alpha": 3}, {"alpha": 0}, {"r_percent": 100.0}, {"batch_size": 2}])
    def test_config_rejects(self, kw):
        with pytest.raises(ValueError):
            _cfg(**kw)


def test_training_learns_clean_blobs():
    cfg = _cfg(r_percent=10.0)
    data = _data(seed=3)
    result = gn_train(init_agents(cfg, LAYERS, 5), data, cfg, 300)
    early = np.mean([np.mean(r.mean_loss) for r in result.records[:20]])
    late = np.mean([np.mean(r.mean_loss) for r in result.records[-20:]])
    assert late < early
    acc = np.mean(predict(result.agents[0].params, data.features, cfg.margin) == data.labels)
    assert acc > 0.6
