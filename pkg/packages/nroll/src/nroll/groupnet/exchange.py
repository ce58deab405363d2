"""Circular MC broadcast with shuffle, and the greedy receiver-side MC selection."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ..errors import ExchangeConfigError


@dataclass(frozen=True)
class ExchangePlan:
    """
    `permutation[p]` is the agent seated at circle position p. `recipients[m]` lists the agents
    m sends its MC to: the ones at the next `alpha` positions around the circle.
    """

    permutation: tuple[int, ...]
    alpha: int
    recipients: tuple[tuple[int, ...], ...]

    def senders(self, recipient: int) -> tuple[int, ...]:
        return tuple(m for m, rec in enumerate(self.recipients) if recipient in rec)


def plan_from_permutation(permutation: Sequence[int], alpha: int) -> ExchangePlan:
    perm = tuple(int(a) for a in permutation)
    M = len(perm)
    if M < 2:
        raise ExchangeConfigError(f"need at least 2 agents, got {M}")
    if sorted(perm) != list(range(M)):
        raise ExchangeConfigError(f"{perm} is not a permutation of 0..{M - 1}")
    if not (1 <= alpha <= M - 1):
        raise ExchangeConfigError(f"exchange degree alpha={alpha} must be in [1, {M - 1}]")
    recipients: list[tuple[int, ...]] = [()] * M
    for p, agent in enumerate(perm):
        recipients[agent] = tuple(perm[(p + k) % M] for k in range(1, alpha + 1))
    return ExchangePlan(permutation=perm, alpha=alpha, recipients=tuple(recipients))


def make_exchange_plan(agents: int, alpha: int, shuffle: bool, rng: np.random.Generator) -> ExchangePlan:
    """
    Seat the agents on the circle for this iteration.

    The seating is a uniform random permutation when shuffling; with shuffle off, or with
    alpha = M - 1 where every seating gives the same plan, it is the identity and no random
    numbers are drawn.
    """
    if agents < 2:
        raise ExchangeConfigError(f"need at least 2 agents, got {agents}")
    if alpha >= agents or alpha < 1:
        raise ExchangeConfigError(f"exchange degree alpha={alpha} must be in [1, {agents - 1}]")
    if shuffle and alpha < agents - 1:
        perm = rng.permutation(agents)
    else:
        perm = np.arange(agents)
    return plan_from_permutation(perm, alpha)


def select_received_mc(
    recipient: int,
    received: Mapping[int, Sequence[int]],
    own_mc_size: int,
    losses: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Greedy pick of MC_ms for one recipient.

    received maps sender -> batch indices it recommended. Indices are ranked by how many
    senders recommended them, then by the mean loss those senders gave them (needs `losses`,
    the (M, B) matrix), then by index. Returns at most own_mc_size indices in that order.
    """
    counts: dict[int, int] = defaultdict(int)
    loss_sums: dict[int, float] = defaultdict(float)
    for sender, idx in received.items():
        if sender == recipient:
            continue
        for i in set(int(j) for j in idx):
            counts[i] += 1
            if losses is not None:
                loss_sums[i] += float(losses[sender, i])
    if not counts or own_mc_size <= 0:
        return np.empty(0, dtype=np.int64)

    def key(i: int) -> tuple:
        mean_loss = loss_sums[i] / counts[i] if losses is not None else 0.0
        return (-counts[i], mean_loss, i)

    ranked = sorted(counts, key=key)
    return np.asarray(ranked[:own_mc_size], dtype=np.int64)
