"""Single-agent Arc-softmax training on whole mini-batches, the reference GroupNet is compared to."""

from __future__ import annotations

import logging
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DivergedError, NumericOverflowError
from .groupnet import GroupConfig, IterationRecord, TrainResult, sample_batch
from .groupnet.trainer import TrainingData
from .learner import Agent, loss_and_grads, sgd_step

log = logging.getLogger(__name__)


def train_baseline(
    data: TrainingData,
    layer_sizes: Sequence[int],
    cfg: GroupConfig,
    iterations: int,
    agent: Optional[Agent] = None,
    rng: Optional[np.random.Generator] = None,
    on_record: Optional[Callable[[IterationRecord], None]] = None,
) -> TrainResult:
    """
    Train one agent with the GroupNet learner settings (batch size, margin, SGD, seed) but no
    partitioning or exchange: every sample of every batch is used. The agent is seeded like
    GroupNet's agent 0.
    """
    if len(data) == 0:
        raise ValueError("cannot train on an empty dataset")
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")
    agent = Agent.create(0, layer_sizes, data.num_classes, cfg.agent_seeds()[0]) if agent is None else agent
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    X, y = data.features, np.asarray(data.labels, dtype=np.int64)
    agent.momentum.reset()
    records: list[IterationRecord] = []
    log.info("training baseline agent for %d iterations", iterations)

    it = -1
    try:
        for it in range(iterations):
            lr = cfg.sgd.lr_at(it, iterations)
            rows = sample_batch(rng, len(data), cfg.batch_size)
            out = loss_and_grads(agent.params, X[rows], y[rows], cfg.margin, weights=np.full(rows.size, 1.0 / rows.size))
            agent.params = sgd_step(agent.params, out.grads, cfg.sgd, agent.momentum, lr)
            mean = float(out.losses.mean())
            rec = IterationRecord(
                iteration=it, warmup=False, lr=lr, r_percent=0.0,
                mean_loss=[mean], group_loss=[mean], hc=int(rows.size), mc_ms=[0], permutation=[0],
            )
            records.append(rec)
            if on_record is not None:
                on_record(rec)
    except NumericOverflowError as e:
        raise DivergedError(f"iteration {it}: {e}") from e
    return TrainResult(agents=[agent], records=records, r_percent=0.0, events=[])
