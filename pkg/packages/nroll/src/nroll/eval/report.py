"""All evaluation metrics for one agent on a held-out set, bundled into an EvalReport."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..datasets import LabelledSet
from ..learner import Agent, MarginConfig
from .classification import closed_set_accuracy
from .identification import gallery_probe_split, rank1
from .pseudo import PseudoLabelScore
from .verification import FPR_POINTS, VerificationResult, make_verification_pairs, verification_accuracy

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalConfig:
    agent_index: int = 0
    pairs: int = 2000
    fpr_points: tuple[float, ...] = FPR_POINTS
    seed: int = 0

    def __post_init__(self):
        if self.agent_index < 0:
            raise ValueError(f"agent_index must be >= 0, got {self.agent_index}")
        if self.pairs < 20:
            raise ValueError(f"pairs must be >= 20, got {self.pairs}")
        if not all(0.0 < p < 1.0 for p in self.fpr_points):
            raise ValueError(f"fpr_points must lie in (0, 1), got {self.fpr_points}")


@dataclass(frozen=True)
class EvalReport:
    test_accuracy: Optional[float]
    verification_accuracy: float
    verification_threshold: float
    tpr_at_fpr: dict[float, float]
    rank1: float
    pseudo_precision: Optional[float] = None
    pseudo_coverage: Optional[float] = None
    pseudo_empty: Optional[bool] = None
    roc: Optional[VerificationResult] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for name in ("test_accuracy", "verification_accuracy", "rank1", "pseudo_precision", "pseudo_coverage"):
            v = getattr(self, name)
            if v is not None and not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {v}")

    def with_pseudo(self, score: PseudoLabelScore) -> "EvalReport":
        return EvalReport(
            test_accuracy=self.test_accuracy,
            verification_accuracy=self.verification_accuracy,
            verification_threshold=self.verification_threshold,
            tpr_at_fpr=self.tpr_at_fpr,
            rank1=self.rank1,
            pseudo_precision=score.precision,
            pseudo_coverage=score.coverage,
            pseudo_empty=score.empty,
            roc=self.roc,
        )

    def to_json(self) -> dict:
        return {
            "test_accuracy": self.test_accuracy,
            "verification_accuracy": self.verification_accuracy,
            "verification_threshold": self.verification_threshold,
            "tpr_at_fpr": {f"{k:g}": v for k, v in self.tpr_at_fpr.items()},
            "rank1": self.rank1,
            "pseudo_precision": self.pseudo_precision,
            "pseudo_coverage": self.pseudo_coverage,
            "pseudo_empty": self.pseudo_empty,
        }


def evaluate_agents(
    agents: list[Agent],
    test: LabelledSet,
    margin: MarginConfig,
    cfg: EvalConfig = EvalConfig(),
    closed_set: bool = True,
) -> EvalReport:
    """
    Score one agent (cfg.agent_index) on a held-out set with known identities.

    Verification pairs and the gallery/probe split are drawn from cfg.seed, so every call on
    the same set compares like with like. `closed_set=False` skips classification accuracy,
    for test sets holding identities the head has no row for.
    """
    if not 0 <= cfg.agent_index < len(agents):
        raise ValueError(f"agent_index {cfg.agent_index} out of range for {len(agents)} agents")
    agent = agents[cfg.agent_index]
    truth = np.where(test.gt_labels >= 0, test.gt_labels, test.labels)
    rng = np.random.default_rng(cfg.seed)

    pairs = make_verification_pairs(truth, cfg.pairs, rng)
    ver = verification_accuracy(agent.embed, test.features, pairs, cfg.fpr_points)
    gallery, probes = gallery_probe_split(truth, rng)
    r1 = rank1(agent.embed, test.features[gallery], truth[gallery], test.features[probes], truth[probes])
    acc = closed_set_accuracy(agent.params, test, margin) if closed_set else None

    report = EvalReport(
        test_accuracy=acc,
        verification_accuracy=ver.accuracy,
        verification_threshold=ver.threshold,
        tpr_at_fpr=ver.tpr_at_fpr,
        rank1=r1,
        roc=ver,
    )
    log.info(
        "agent %d: test acc %s, verification %.4f, rank-1 %.4f",
        cfg.agent_index, "n/a" if acc is None else f"{acc:.4f}", ver.accuracy, r1,
    )
    return report
