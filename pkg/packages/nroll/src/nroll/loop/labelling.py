"""High-confidence pseudo labelling of an unlabelled part by the whole group."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..datasets import UnlabelledPart
from ..learner import Agent, MarginConfig, forward_logits
from .config import LabelConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PseudoLabels:
    ids: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    confidence: np.ndarray
    part_index: np.ndarray  # which part each sample came from

    def __len__(self) -> int:
        return int(self.ids.size)

    @classmethod
    def empty(cls, d: int) -> "PseudoLabels":
        return cls(
            ids=np.empty(0, dtype=np.int64),
            features=np.empty((0, d)),
            labels=np.empty(0, dtype=np.int64),
            confidence=np.empty(0),
            part_index=np.empty(0, dtype=np.int64),
        )

    @classmethod
    def concat(cls, items: list["PseudoLabels"], d: int) -> "PseudoLabels":
        if not items:
            return cls.empty(d)
        return cls(
            ids=np.concatenate([p.ids for p in items]),
            features=np.concatenate([p.features for p in items]).reshape(-1, d),
            labels=np.concatenate([p.labels for p in items]),
            confidence=np.concatenate([p.confidence for p in items]),
            part_index=np.concatenate([p.part_index for p in items]),
        )


@dataclass(frozen=True)
class LabelOutcome:
    pseudo: PseudoLabels
    dropped: np.ndarray
    total: int

    @property
    def confident_fraction(self) -> float:
        return len(self.pseudo) / self.total if self.total else 0.0


def agent_confidences(agent: Agent, X: np.ndarray, cfg: LabelConfig, margin: MarginConfig) -> np.ndarray:
    """(N, C) confidences of one agent: softmax posterior, raw cosine or s * cosine."""
    cos, post = forward_logits(agent.params, np.atleast_2d(X), margin)
    if cfg.confidence == "posterior":
        return post
    if cfg.confidence == "cosine":
        return cos
    return margin.scale * cos


def pick_confident(conf: np.ndarray, threshold: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    conf: (M, N, C). For each sample, the largest of its M * C entries decides the class.
    Returns (labels, best confidence, accepted mask); ties go to the lower agent, then class.
    """
    M, N, C = conf.shape
    flat = np.transpose(conf, (1, 0, 2)).reshape(N, M * C)
    best = np.argmax(flat, axis=1)
    top = flat[np.arange(N), best]
    return (best % C).astype(np.int64), top, top >= threshold


def label_part(
    agents: list[Agent], part: UnlabelledPart, cfg: LabelConfig, margin: MarginConfig, threshold: float | None = None
) -> LabelOutcome:
    """Label every sample whose best confidence over all agents and classes reaches the threshold."""
    threshold = cfg.threshold if threshold is None else threshold
    classes = {a.params.num_classes for a in agents}
    if len(classes) != 1:
        raise ValueError(f"agents disagree on the class space: {sorted(classes)}")
    d = part.features.shape[1]
    if len(part) == 0:
        return LabelOutcome(PseudoLabels.empty(d), np.empty(0, dtype=np.int64), 0)

    conf = np.stack([agent_confidences(a, part.features, cfg, margin) for a in agents])
    labels, top, ok = pick_confident(conf, threshold)
    pseudo = PseudoLabels(
        ids=part.ids[ok].copy(),
        features=part.features[ok].copy(),
        labels=labels[ok],
        confidence=top[ok],
        part_index=np.full(int(ok.sum()), part.index, dtype=np.int64),
    )
    outcome = LabelOutcome(pseudo, part.ids[~ok].copy(), len(part))
    log.info(
        "part %d: %d of %d samples labelled at threshold %.3f (%.1f%%)",
        part.index, len(pseudo), len(part), threshold, 100.0 * outcome.confident_fraction,
    )
    return outcome
