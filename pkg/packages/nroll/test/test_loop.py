from dataclasses import replace

import numpy as np
import pytest

from nroll.datasets import gen_synthetic, holdout, inject_noise, split_open_set, split_parts
from nroll.errors import DivergedError
from nroll.groupnet import GroupConfig, gn_train, init_agents
from nroll.learner import MarginConfig, SgdConfig
from nroll.loop import LabelConfig, LoopObserver, LoopState, NrollConfig, OpenSetConfig, run_nroll
from nroll.eval import EvalConfig

pytestmark = [pytest.mark.unit]

CFG = NrollConfig(
    group=GroupConfig(
        agents=2,
        alpha=1,
        batch_size=32,
        r_percent=0.0,
        margin=MarginConfig(margin=0.2, scale=8.0),
        sgd=SgdConfig(lr=0.01, momentum=0.9),
        workers=1,
    ),
    eval=EvalConfig(pairs=200),
    hidden=(16,),
    embed_dim=8,
    pretrain_iterations=60,
    loop_iterations=30,
)


def _split(parts=3, noise=0.2, seed=0):
    data = gen_synthetic(classes=6, per_class=30, d_in=8, intra_spread=0.1, seed=seed)
    train, test = holdout(data, per_class=5, seed=seed)
    labelled, unlabelled = split_parts(train, parts, seed=seed)
    return inject_noise(labelled, noise, seed=seed + 1), unlabelled, test


class Recorder(LoopObserver):
    def __init__(self):
        self.records = 0
        self.estimates = []
        self.loops = []

    def on_record(self, t, record):
        self.records += 1

    def on_estimate(self, t, estimate):
        self.estimates.append(t)

    def on_loop(self, state, metrics, agents):
        self.loops.append(metrics.t)


def test_no_parts_is_plain_training():
    labelled, _, _ = _split()
    cfg = replace(CFG, initial_r_percent=10.0)
    result = run_nroll(cfg, labelled, [])
    assert [m.t for m in result.metrics] == [0]

    train_seq, _ = np.random.SeedSequence(cfg.group.seed).spawn(2)
    agents = init_agents(cfg.group, cfg.layer_sizes(labelled.dim), labelled.num_classes)
    gn_train(agents, labelled, replace(cfg.group, r_percent=10.0), cfg.pretrain_iterations, rng=np.random.default_rng(train_seq))
    for mine, ref in zip(result.agents, agents):
        for name, value in ref.params.tensors().items():
            assert np.array_equal(mine.params.tensors()[name], value)


def test_loop_bookkeeping():
    labelled, parts, test = _split(parts=4)
    rec = Recorder()
    result = run_nroll(CFG, labelled, parts, test=test, observer=rec)
    sizes = [m.labelled_size for m in result.metrics]
    assert [m.t for m in result.metrics] == [0, 1, 2, 3]
    assert all(b >= a for a, b in zip(sizes, sizes[1:]))
    assert result.state.remaining == []
    assert rec.loops == [0, 1, 2, 3] and rec.estimates == [0, 1, 2, 3]
    assert rec.records == CFG.pretrain_iterations + 3 * CFG.loop_iterations

    for part in parts:
        kept = set(result.labelled.ids.tolist()) & set(part.ids.tolist())
        dropped = set(result.dropped[part.index])
        assert kept | dropped == set(part.ids.tolist()) and not kept & dropped
        assert len(result.labelled.from_loop(part.index)) == len(kept)

    for m in result.metrics[1:]:
        assert m.added + m.dropped == len(parts[m.t - 1])
        assert 0.0 <= m.pseudo_acc <= 1.0
        assert 0.0 <= m.test_acc <= 1.0 and 0.0 <= m.verification_acc <= 1.0
        assert m.r_est >= 0.0 and m.r_train <= CFG.max_r_percent


def test_deterministic():
    labelled, parts, _ = _split()
    a = run_nroll(CFG, labelled, parts)
    b = run_nroll(CFG, labelled, parts)
    assert [m.to_json() for m in a.metrics] == [m.to_json() for m in b.metrics]
    assert a.labelled.equals(b.labelled)


def test_parts_per_loop():
    labelled, parts, _ = _split(parts=6)
    cfg = replace(CFG, label=LabelConfig(parts_per_loop=2), loop_iterations=10)
    result = run_nroll(cfg, labelled, parts)
    assert [m.t for m in result.metrics] == [0, 1, 2, 3]
    assert result.metrics[1].added + result.metrics[1].dropped == len(parts[0]) + len(parts[1])
    assert result.metrics[3].added + result.metrics[3].dropped == len(parts[4])


def test_threshold_lowered_once_after_dry_loops():
    labelled, parts, _ = _split(parts=5)
    cfg = replace(CFG, label=LabelConfig(threshold=1.5), loop_iterations=10)
    result = run_nroll(cfg, labelled, parts)
    assert [m.added for m in result.metrics[1:]] == [0, 0, 0, 0]
    assert [m.threshold for m in result.metrics] == pytest.approx([1.5, 1.5, 1.5, 1.45, 1.45])
    lowered = [e for e in result.events if "threshold lowered" in e]
    assert len(lowered) == 1 and lowered[0].startswith("loop 2:")


def test_divergence_carries_state(monkeypatch):
    labelled, parts, _ = _split()

    def explode(*args, **kwargs):
        raise DivergedError("iteration 3: numeric overflow")

    monkeypatch.setattr("nroll.loop.orchestrator.gn_train", explode)
    with pytest.raises(DivergedError) as exc:
        run_nroll(CFG, labelled, parts)
    assert isinstance(exc.value.state, LoopState)
    assert exc.value.state.t == 0


def test_open_set():
    data = gen_synthetic(classes=8, per_class=24, d_in=8, intra_spread=0.1, seed=4)
    split = split_open_set(data, 3, seed=4)
    cfg = replace(CFG, open_set=OpenSetConfig(enabled=True, tau_new=0.5), loop_iterations=20)
    result = run_nroll(cfg, split.labelled, split.parts, class_map=split.class_map)
    bank = result.bank
    assert bank is not None and bank.first_id == 4
    assert sum(m.new_identities for m in result.metrics) == len(bank)
    assert all(a.params.num_classes == 4 + len(bank) for a in result.agents)
    assert result.labelled.num_classes == 4 + len(bank)
    bank.check_norms()
    for m in result.metrics[1:]:
        assert m.pseudo_acc is None or 0.0 <= m.pseudo_acc <= 1.0
        assert m.part_acc is None


def test_open_set_split_without_prototypes():
    data = gen_synthetic(classes=8, per_class=28, d_in=8, intra_spread=0.1, seed=4)
    train, test = holdout(data, per_class=4, seed=4)
    split = split_open_set(train, 3, seed=4)
    cfg = replace(CFG, open_set=OpenSetConfig(enabled=True, prototypes=False), loop_iterations=20)
    assert not cfg.open_set.uses_prototypes
    result = run_nroll(cfg, split.labelled, split.parts, test=test, class_map=split.class_map)
    assert result.bank is None
    assert all(a.params.num_classes == 4 for a in result.agents)
    assert result.labelled.num_classes == 4
    for m in result.metrics:
        assert m.test_acc is None and m.rank1 is not None
        assert m.new_identities == 0
    for m in result.metrics[1:]:
        assert m.part_acc is None
        assert m.pseudo_acc is None or 0.0 <= m.pseudo_acc <= 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        NrollConfig(max_r_percent=100.0)
    with pytest.raises(ValueError):
        NrollConfig(initial_r_percent=-1.0)
    with pytest.raises(ValueError):
        OpenSetConfig(ema=1.0)
    assert NrollConfig(hidden=(10, 12), embed_dim=4).layer_sizes(7) == [7, 10, 12, 4]
