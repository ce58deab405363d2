"""
The GroupNet training loop.

Every iteration draws one mini-batch shared by all agents. Agents rank it by their own
per-sample Arc-softmax losses (phase 1, parallel), the orchestrator partitions it and
routes MC recommendations around the circle (serial), then each agent takes one SGD step
on its balanced HC + MC_ms loss (phase 2, parallel).
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from nrollpyutils.system import get_worker_count

from ..errors import DivergedError, EmptyEffectiveBatch, NumericOverflowError
from ..learner import Agent, loss_and_grads, per_sample_losses, sgd_step
from .config import GroupConfig
from .exchange import ExchangePlan, make_exchange_plan, select_received_mc
from .group_loss import group_loss
from .partition import BatchPartition, partition_batch

log = logging.getLogger(__name__)


class TrainingData(Protocol):
    features: np.ndarray
    labels: np.ndarray
    gt_labels: np.ndarray
    num_classes: int

    def __len__(self) -> int: ...


@dataclass
class IterationRecord:
    iteration: int
    warmup: bool
    lr: float
    r_percent: float
    mean_loss: list[float]
    group_loss: list[Optional[float]]
    hc: int
    mc_ms: list[int]
    permutation: list[int]
    batch_noise: Optional[float] = None
    hc_noise: Optional[float] = None
    events: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class TrainResult:
    agents: list[Agent]
    records: list[IterationRecord]
    r_percent: float
    events: list[str]


def init_agents(cfg: GroupConfig, layer_sizes: Sequence[int], num_classes: int) -> list[Agent]:
    return [Agent.create(m, layer_sizes, num_classes, seed) for m, seed in enumerate(cfg.agent_seeds())]


def sample_batch(rng: np.random.Generator, n: int, batch_size: int) -> np.ndarray:
    return rng.choice(n, size=min(batch_size, n), replace=False)


def _noise_fraction(noisy: Optional[np.ndarray], known: Optional[np.ndarray], rows: np.ndarray) -> Optional[float]:
    if noisy is None or known is None or rows.size == 0:
        return None
    k = known[rows]
    if not k.any():
        return None
    return float(noisy[rows][k].mean())


def _mc_routing(part: BatchPartition, plan: ExchangePlan, losses: np.ndarray) -> list[np.ndarray]:
    chosen = []
    for m in range(part.agents):
        received = {s: part.mc_per_agent[s] for s in plan.senders(m)}
        chosen.append(select_received_mc(m, received, len(part.mc_per_agent[m]), losses))
    return chosen


def gn_train(
    agents: list[Agent],
    data: TrainingData,
    cfg: GroupConfig,
    iterations: int,
    rng: Optional[np.random.Generator] = None,
    on_warmup_end: Optional[Callable[[list[Agent]], float]] = None,
    on_record: Optional[Callable[[IterationRecord], None]] = None,
) -> TrainResult:
    """
    Train the agents in place for `iterations` steps.

    The first `cfg.warmup_fraction` of iterations train every agent on the whole batch with
    Arc-softmax. `on_warmup_end`, when given, is called once warmup finishes and returns the
    noise rate (percent) to use from then on. The learning-rate schedule and momentum restart
    with each call.
    """
    if len(data) == 0:
        raise ValueError("cannot train on an empty dataset")
    if len(agents) != cfg.agents:
        raise ValueError(f"config has {cfg.agents} agents but {len(agents)} were given")
    for a in agents:
        if a.params.num_classes != data.num_classes:
            raise ValueError(f"agent {a.index} has {a.params.num_classes} classes, dataset has {data.num_classes}")
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")

    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    X, y = data.features, np.asarray(data.labels, dtype=np.int64)
    gt = np.asarray(data.gt_labels, dtype=np.int64)
    known = gt >= 0
    noisy = (y != gt) if known.any() else None
    M = cfg.agents
    warmup = cfg.warmup_iterations(iterations)
    r_percent = cfg.r_percent
    margin = cfg.margin
    workers = min(M, get_worker_count(cfg.workers))
    records: list[IterationRecord] = []
    events: list[str] = []
    for a in agents:
        a.momentum.reset()

    log.info(
        "training %d agents for %d iterations (warmup %d, r=%.2f%%, alpha=%d, shuffle=%s, %d workers)",
        M, iterations, warmup, r_percent, cfg.alpha, cfg.shuffle, workers,
    )

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def each(fn, items):
        return list(pool.map(fn, items)) if pool is not None else [fn(i) for i in items]

    it = -1
    try:
        for it in range(iterations):
            if it == warmup and on_warmup_end is not None:
                r_percent = float(on_warmup_end(agents))
                log.info("warmup done after %d iterations; noise rate now %.2f%%", warmup, r_percent)

            lr = cfg.sgd.lr_at(it, iterations)
            rows = sample_batch(rng, len(data), cfg.batch_size)
            Xb, yb = X[rows], y[rows]

            if it < warmup:
                weights = np.full(len(rows), 1.0 / len(rows))

                def warm_step(a: Agent) -> float:
                    out = loss_and_grads(a.params, Xb, yb, margin, t=1.0, weights=weights)
                    a.params = sgd_step(a.params, out.grads, cfg.sgd, a.momentum, lr)
                    return float(out.losses.mean())

                means = each(warm_step, agents)
                rec = IterationRecord(
                    iteration=it, warmup=True, lr=lr, r_percent=r_percent,
                    mean_loss=means, group_loss=list(means), hc=len(rows), mc_ms=[0] * M,
                    permutation=list(range(M)),
                    batch_noise=_noise_fraction(noisy, known, rows),
                    hc_noise=_noise_fraction(noisy, known, rows),
                )
            else:
                losses = np.stack(each(lambda a: per_sample_losses(a.params, Xb, yb, margin), agents))
                part = partition_batch(losses, r_percent)
                part.check(r_percent)
                plan = make_exchange_plan(M, cfg.alpha, cfg.shuffle, rng)
                mc_ms = _mc_routing(part, plan, losses)

                def group_step(m: int) -> tuple[Optional[float], Optional[str]]:
                    a = agents[m]
                    hc, mc = part.hc, mc_ms[m]
                    try:
                        gl = group_loss(m, a.params, Xb[hc], yb[hc], Xb[mc], yb[mc], margin)
                    except EmptyEffectiveBatch as e:
                        return None, str(e)
                    a.params = sgd_step(a.params, gl.grads, cfg.sgd, a.momentum, lr)
                    return gl.loss, None

                stepped = each(group_step, range(M))
                group_losses = [loss for loss, _ in stepped]
                record_events = [ev for _, ev in stepped if ev is not None]
                for ev in record_events:
                    log.warning("iteration %d: %s", it, ev)
                rec = IterationRecord(
                    iteration=it, warmup=False, lr=lr, r_percent=r_percent,
                    mean_loss=[float(v) for v in losses.mean(axis=1)],
                    group_loss=group_losses, hc=int(part.hc.size), mc_ms=[int(m.size) for m in mc_ms],
                    permutation=list(plan.permutation),
                    batch_noise=_noise_fraction(noisy, known, rows),
                    hc_noise=_noise_fraction(noisy, known, rows[part.hc]),
                    events=sorted(record_events),
                )
            events.extend(rec.events)
            records.append(rec)
            if on_record is not None:
                on_record(rec)
            if it % 100 == 0 or it == iterations - 1:
                log.debug("iteration %d: lr=%g hc=%d mc_ms=%s loss=%s", it, lr, rec.hc, rec.mc_ms, rec.mean_loss)
    except NumericOverflowError as e:
        raise DivergedError(f"iteration {it}: {e}") from e
    finally:
        if pool is not None:
            pool.shutdown(wait=True)

    if warmup >= iterations and on_warmup_end is not None:
        r_percent = float(on_warmup_end(agents))
    return TrainResult(agents=agents, records=records, r_percent=r_percent, events=events)
