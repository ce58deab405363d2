from __future__ import annotations

from dataclasses import dataclass, field

from ..learner import MarginConfig, SgdConfig


@dataclass(frozen=True)
class GroupConfig:
    """Settings for one GroupNet: agents, exchange, noise rate and the per-agent learner."""

    agents: int = 4
    alpha: int = 3  # exchange degree: peers each agent broadcasts its MC to
    shuffle: bool = True
    r_percent: float = 0.0
    batch_size: int = 128
    margin: MarginConfig = field(default_factory=MarginConfig)
    sgd: SgdConfig = field(default_factory=SgdConfig)
    seed: int = 0
    warmup_fraction: float = 0.1
    workers: int | None = None  # None: COTRAIN_THREADS or the CPU count

    def __post_init__(self):
        if self.agents < 2:
            raise ValueError(f"agents must be >= 2, got {self.agents}")
        if not (1 <= self.alpha <= self.agents - 1):
            raise ValueError(f"alpha must be in [1, {self.agents - 1}], got {self.alpha}")
        if not (0.0 <= self.r_percent < 100.0):
            raise ValueError(f"r_percent must be in [0, 100), got {self.r_percent}")
        if self.batch_size < self.agents:
            raise ValueError(f"batch_size ({self.batch_size}) must be >= agents ({self.agents})")
        if not (0.0 <= self.warmup_fraction < 1.0):
            raise ValueError(f"warmup_fraction must be in [0, 1), got {self.warmup_fraction}")
        if self.workers is not None and self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    def agent_seeds(self) -> list[int]:
        return [self.seed * 1000 + m + 1 for m in range(self.agents)]

    def warmup_iterations(self, iterations: int) -> int:
        return int(self.warmup_fraction * iterations)
