import numpy as np
import pytest

from nroll.errors import EmptyBatchError
from nroll.groupnet import lc_count, partition_batch

pytestmark = [pytest.mark.unit]


class TestPartitionBatch:
    def test_hand_traced_example(self):
        losses = np.array([
            [0.1, 0.2, 0.3, 0.9, 1.0, 1.1],
            [0.15, 0.25, 1.2, 0.35, 1.0, 1.1],
        ])
        part = partition_batch(losses, 50)
        assert [lc.tolist() for lc in part.lc_per_agent] == [[3, 4, 5], [2, 4, 5]]
        assert part.hc.tolist() == [0, 1]
        assert [mc.tolist() for mc in part.mc_per_agent] == [[2], [3]]
        part.check(50)

    def test_zero_noise(self):
        part = partition_batch(np.random.default_rng(0).random((3, 10)), 0)
        assert part.hc.tolist() == list(range(10))
        assert all(lc.size == 0 for lc in part.lc_per_agent)
        assert all(mc.size == 0 for mc in part.mc_per_agent)

    def test_full_agreement(self):
        row = np.array([0.5, 0.1, 0.9, 0.3, 0.7, 0.2, 0.8, 0.4, 0.6, 0.0])
        part = partition_batch(np.stack([row, row, row]), 30)
        assert all(mc.size == 0 for mc in part.mc_per_agent)
        assert part.hc.tolist() == sorted(np.argsort(row)[:7].tolist())

    def test_ties_go_to_lower_index(self):
        part = partition_batch(np.array([[1.0, 1.0, 1.0, 0.0], [1.0, 1.0, 1.0, 0.0]]), 50)
        assert part.lc_per_agent[0].tolist() == [0, 1]

    def test_empty_batch(self):
        with pytest.raises(EmptyBatchError):
            partition_batch(np.zeros((2, 0)), 10)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            partition_batch(np.array([[np.nan, 1.0], [0.0, 1.0]]), 10)

    def test_lc_count_rounding(self):
        assert lc_count(30, 10) == 3
        assert lc_count(33.3, 128) == 42
        assert lc_count(0, 128) == 0


def test_tiling_invariants_on_random_batches():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        M = int(rng.integers(2, 6))
        B = int(rng.integers(M, 64))
        r = float(rng.uniform(0, 99))
        losses = rng.exponential(size=(M, B))
        if rng.random() < 0.3:
            losses = np.round(losses, 1)  # force ties
        part = partition_batch(losses, r)
        part.check(r)
        assert all(lc.size == lc_count(r, B) for lc in part.lc_per_agent)
