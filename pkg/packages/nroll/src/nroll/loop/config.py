from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

from ..eval import EvalConfig
from ..groupnet import GroupConfig
from ..noise import NoiseConfig

ConfidenceKind = Literal["posterior", "cosine", "scaled-logit"]
CONFIDENCE_KINDS: tuple[str, ...] = ("posterior", "cosine", "scaled-logit")


@dataclass(frozen=True)
class LabelConfig:
    threshold: float = 0.8
    confidence: ConfidenceKind = "posterior"
    parts_per_loop: int = 1
    # after this many loops in a row with nothing added, lower the threshold once
    lower_after: int = 2
    lower_step: float = 0.05
    threshold_floor: float = 0.5

    def __post_init__(self):
        if not self.threshold >= 0.0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")
        if self.confidence not in CONFIDENCE_KINDS:
            raise ValueError(f"confidence must be one of {CONFIDENCE_KINDS}, got {self.confidence!r}")
        if self.parts_per_loop < 1:
            raise ValueError(f"parts_per_loop must be >= 1, got {self.parts_per_loop}")
        if self.lower_after < 1:
            raise ValueError(f"lower_after must be >= 1, got {self.lower_after}")
        if self.lower_step < 0:
            raise ValueError(f"lower_step must be >= 0, got {self.lower_step}")


@dataclass(frozen=True)
class OpenSetConfig:
    """
    `enabled` marks an open-set split: seed classes are renumbered and the parts hold unseen
    identities. `prototypes` turns on the new-identity bank; without it the loop falls back to
    plain confidence-threshold pseudo labelling over the seen classes.
    """

    enabled: bool = False
    prototypes: bool = True
    tau_new: float = 0.5
    ema: float = 0.9

    def __post_init__(self):
        if not (-1.0 <= self.tau_new <= 1.0):
            raise ValueError(f"tau_new must be in [-1, 1], got {self.tau_new}")
        if not (0.0 <= self.ema < 1.0):
            raise ValueError(f"ema must be in [0, 1), got {self.ema}")

    @property
    def uses_prototypes(self) -> bool:
        return self.enabled and self.prototypes


@dataclass(frozen=True)
class NrollConfig:
    group: GroupConfig = field(default_factory=GroupConfig)
    label: LabelConfig = field(default_factory=LabelConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    open_set: OpenSetConfig = field(default_factory=OpenSetConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    hidden: tuple[int, ...] = (64,)
    embed_dim: int = 32
    pretrain_iterations: int = 600
    loop_iterations: int = 600
    # None: estimate after the pretrain warmup; otherwise train the seed set at this rate
    initial_r_percent: Optional[float] = None
    max_r_percent: float = 90.0

    def __post_init__(self):
        if self.embed_dim < 2:
            raise ValueError(f"embed_dim must be >= 2, got {self.embed_dim}")
        if any(h < 1 for h in self.hidden):
            raise ValueError(f"hidden layer widths must be >= 1, got {self.hidden}")
        if self.pretrain_iterations < 0 or self.loop_iterations < 0:
            raise ValueError("iteration counts must be >= 0")
        if self.initial_r_percent is not None and not (0.0 <= self.initial_r_percent < 100.0):
            raise ValueError(f"initial_r_percent must be in [0, 100), got {self.initial_r_percent}")
        if not (0.0 <= self.max_r_percent < 100.0):
            raise ValueError(f"max_r_percent must be in [0, 100), got {self.max_r_percent}")

    def layer_sizes(self, d_in: int) -> list[int]:
        return [d_in, *self.hidden, self.embed_dim]
