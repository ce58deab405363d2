"""
Open-set labelling: samples that match no known identity seed a new one, whose prototype
then follows its later members by exponential moving average.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from ..datasets import UnlabelledPart
from ..learner import Agent, MarginConfig
from .config import LabelConfig, OpenSetConfig
from .labelling import LabelOutcome, PseudoLabels, agent_confidences, pick_confident

log = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-6


def _unit(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)


@dataclass
class PrototypeBank:
    """
    Unit prototypes of the identities discovered so far. Identity k has class id first_id + k,
    so bank ids never collide with the seed classes 0..first_id-1.
    """

    first_id: int
    dim: int
    ema: float = 0.9
    tau_new: float = 0.5
    prototypes: np.ndarray = field(init=False, repr=False)
    counts: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.prototypes = np.empty((0, self.dim))

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def ids(self) -> np.ndarray:
        return self.first_id + np.arange(len(self), dtype=np.int64)

    def add(self, feature: np.ndarray) -> int:
        self.prototypes = np.vstack([self.prototypes, _unit(feature)])
        self.counts.append(1)
        return self.first_id + len(self) - 1

    def update(self, class_id: int, feature: np.ndarray) -> np.ndarray:
        """F <- ema * F + (1 - ema) * feature, renormalised to unit length."""
        k = class_id - self.first_id
        if not 0 <= k < len(self):
            raise KeyError(f"class {class_id} is not a bank identity")
        mixed = self.ema * self.prototypes[k] + (1.0 - self.ema) * np.asarray(feature, dtype=np.float64)
        self.prototypes[k] = _unit(mixed)
        self.counts[k] += 1
        return self.prototypes[k]

    def similarities(self, f: np.ndarray) -> np.ndarray:
        return self.prototypes @ f

    def check_norms(self) -> None:
        norms = np.linalg.norm(self.prototypes, axis=1)
        assert np.all(np.abs(norms - 1.0) <= NORM_TOLERANCE), f"prototype norms drifted: {norms}"

    def to_json(self) -> dict:
        return {"first_id": self.first_id, "ema": self.ema, "tau_new": self.tau_new, "counts": list(self.counts)}

    @classmethod
    def for_agents(cls, agents: list[Agent], cfg: OpenSetConfig) -> "PrototypeBank":
        head = agents[0].params.head
        return cls(first_id=head.num_classes, dim=head.embed_dim, ema=cfg.ema, tau_new=cfg.tau_new)


@dataclass(frozen=True)
class Assignment:
    kind: Literal["known", "new", "prototype", "dropped"]
    label: Optional[int]
    similarity: float
    confidence: Optional[float] = None


def open_set_assign(
    agents: list[Agent],
    x: np.ndarray,
    bank: PrototypeBank,
    label_cfg: LabelConfig,
    margin: MarginConfig,
    threshold: Optional[float] = None,
    tau_new: Optional[float] = None,
) -> Assignment:
    """
    Assign one sample, embedded by agent 0. Below tau_new against every seed class row and
    every prototype it founds a new identity, and every agent's head gains a row at its own
    embedding of the sample. Closest to a prototype, it joins that identity. Otherwise the
    group's confidence over the seed classes decides, dropping it below the threshold.
    """
    tau = bank.tau_new if tau_new is None else tau_new
    threshold = label_cfg.threshold if threshold is None else threshold
    f = agents[0].embed(x)[0]
    seed_sims = agents[0].params.head.W[: bank.first_id] @ f
    bank_sims = bank.similarities(f)
    best_seed = float(seed_sims.max()) if seed_sims.size else -np.inf
    best_bank = float(bank_sims.max()) if bank_sims.size else -np.inf
    best = max(best_seed, best_bank)

    if best < tau:
        label = bank.add(f)
        for a in agents:
            a.grow_head(f[None, :] if a is agents[0] else a.embed(x))
        log.debug("new identity %d (best similarity %.3f)", label, best)
        return Assignment("new", label, best)
    if best_bank > best_seed:
        label = int(bank.ids[int(np.argmax(bank_sims))])
        bank.update(label, f)
        return Assignment("prototype", label, best_bank)

    conf = np.stack([agent_confidences(a, x, label_cfg, margin)[:, : bank.first_id] for a in agents])
    labels, top, ok = pick_confident(conf, threshold)
    if ok[0]:
        return Assignment("known", int(labels[0]), best_seed, float(top[0]))
    return Assignment("dropped", None, best_seed, float(top[0]))


def open_set_label_part(
    agents: list[Agent],
    part: UnlabelledPart,
    bank: PrototypeBank,
    label_cfg: LabelConfig,
    margin: MarginConfig,
    threshold: Optional[float] = None,
) -> LabelOutcome:
    """open_set_assign over a part, one sample at a time in id order."""
    d = part.features.shape[1]
    keep: list[int] = []
    labels: list[int] = []
    conf: list[float] = []
    dropped: list[int] = []
    for i in range(len(part)):
        a = open_set_assign(agents, part.features[i], bank, label_cfg, margin, threshold)
        if a.kind == "dropped":
            dropped.append(int(part.ids[i]))
            continue
        keep.append(i)
        labels.append(int(a.label))
        conf.append(a.similarity if a.confidence is None else a.confidence)
    bank.check_norms()
    rows = np.asarray(keep, dtype=np.int64)
    pseudo = PseudoLabels(
        ids=part.ids[rows].copy(),
        features=part.features[rows].reshape(-1, d).copy(),
        labels=np.asarray(labels, dtype=np.int64),
        confidence=np.asarray(conf, dtype=np.float64),
        part_index=np.full(rows.size, part.index, dtype=np.int64),
    )
    log.info(
        "part %d (open set): %d labelled, %d dropped, %d identities in the bank",
        part.index, len(pseudo), len(dropped), len(bank),
    )
    return LabelOutcome(pseudo, np.asarray(dropped, dtype=np.int64), len(part))
