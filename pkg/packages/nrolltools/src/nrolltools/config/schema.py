"""
The experiment config: one nested frozen dataclass per section.

Sections that are plain library settings (margin, sgd, label, noise_estimator, eval) reuse
the library's own config dataclasses, so the defaults live in one place.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, ClassVar, Literal, Mapping, Optional, Sequence

from nroll.eval import EvalConfig
from nroll.groupnet import GroupConfig
from nroll.learner import MarginConfig, SgdConfig
from nroll.loop import LabelConfig, NrollConfig, OpenSetConfig
from nroll.noise import NoiseConfig

from .loader import apply_overrides, from_dict, load_mapping, to_dict


@dataclass(frozen=True)
class DatasetSpec:
    kind: Literal["synthetic", "csv"] = "synthetic"
    classes: int = 50
    per_class: int = 60
    d_in: int = 32
    intra_spread: float = 0.2
    path: Optional[str] = None
    test_per_class: int = 10  # held out per class as the clean test set; 0 disables evaluation

    def __post_init__(self):
        if self.kind == "csv" and not self.path:
            raise ValueError("dataset.path is required when dataset.kind is 'csv'")
        if self.kind == "synthetic" and (self.classes < 2 or self.per_class < 2 or self.d_in < 2):
            raise ValueError("dataset.classes, dataset.per_class and dataset.d_in must all be >= 2")
        if self.intra_spread < 0:
            raise ValueError(f"dataset.intra_spread must be >= 0, got {self.intra_spread}")
        if self.test_per_class < 0:
            raise ValueError(f"dataset.test_per_class must be >= 0, got {self.test_per_class}")


@dataclass(frozen=True)
class NoiseSpec:
    rate: float = 0.0
    mode: Literal["symmetric", "pairflip"] = "symmetric"

    def __post_init__(self):
        if not (0.0 <= self.rate < 1.0):
            raise ValueError(f"noise.rate must be in [0, 1), got {self.rate}")


@dataclass(frozen=True)
class SplitSpec:
    parts: int = 5  # S + 1: one labelled seed part and S unlabelled parts
    open_set: bool = False
    seen_fraction: float = 0.5

    def __post_init__(self):
        if self.parts < 1:
            raise ValueError(f"split.parts must be >= 1, got {self.parts}")
        if self.open_set and self.parts < 2:
            raise ValueError("split.open_set needs split.parts >= 2")


@dataclass(frozen=True)
class GroupSpec:
    REJECTED_KEYS: ClassVar[Mapping[str, str]] = {
        "seed": "agent seeds derive from the top-level `seed`",
        "r_percent": "set `train.r_percent` or `nroll.initial_r_percent` (or leave unset to estimate it)",
    }

    agents: int = 4
    alpha: int = 3
    shuffle: bool = True
    batch_size: int = 128
    warmup_fraction: float = 0.1
    workers: Optional[int] = None
    margin: MarginConfig = field(default_factory=MarginConfig)
    sgd: SgdConfig = field(default_factory=SgdConfig)

    def __post_init__(self):
        self.to_group_config()

    def to_group_config(self, seed: int = 0, r_percent: float = 0.0, workers: Optional[int] = None) -> GroupConfig:
        return GroupConfig(
            agents=self.agents,
            alpha=self.alpha,
            shuffle=self.shuffle,
            r_percent=r_percent,
            batch_size=self.batch_size,
            margin=self.margin,
            sgd=self.sgd,
            seed=seed,
            warmup_fraction=self.warmup_fraction,
            workers=self.workers if self.workers is not None else workers,
        )


@dataclass(frozen=True)
class ModelSpec:
    hidden: tuple[int, ...] = (64,)
    embed_dim: int = 32


@dataclass(frozen=True)
class TrainSpec:
    iterations: int = 600
    r_percent: Optional[float] = None  # None: estimate the noise rate when warmup ends

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError(f"train.iterations must be >= 0, got {self.iterations}")
        if self.r_percent is not None and not (0.0 <= self.r_percent < 100.0):
            raise ValueError(f"train.r_percent must be in [0, 100), got {self.r_percent}")


@dataclass(frozen=True)
class NrollSpec:
    pretrain_iterations: int = 600
    loop_iterations: int = 600
    initial_r_percent: Optional[float] = None
    max_r_percent: float = 90.0


@dataclass(frozen=True)
class OpenSetSpec:
    prototypes: bool = True  # false: plain pseudo labelling on an open-set split
    tau_new: float = 0.5
    ema: float = 0.9


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "default"
    seed: int = 0
    runs_dir: Optional[str] = None  # None: NROLL_RUNS_DIR, else "runs"
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    split: SplitSpec = field(default_factory=SplitSpec)
    group: GroupSpec = field(default_factory=GroupSpec)
    model: ModelSpec = field(default_factory=ModelSpec)
    train: TrainSpec = field(default_factory=TrainSpec)
    nroll: NrollSpec = field(default_factory=NrollSpec)
    label: LabelConfig = field(default_factory=LabelConfig)
    open_set: OpenSetSpec = field(default_factory=OpenSetSpec)
    noise_estimator: NoiseConfig = field(default_factory=NoiseConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def __post_init__(self):
        if not self.name or "/" in self.name or self.name in (".", ".."):
            raise ValueError(f"name must be a plain directory name, got {self.name!r}")
        if self.eval.agent_index >= self.group.agents:
            raise ValueError(
                f"eval.agent_index ({self.eval.agent_index}) must be < group.agents ({self.group.agents})"
            )
        self.nroll_config()

    def group_config(self, r_percent: float = 0.0, workers: Optional[int] = None) -> GroupConfig:
        return self.group.to_group_config(seed=self.seed, r_percent=r_percent, workers=workers)

    def nroll_config(self, workers: Optional[int] = None) -> NrollConfig:
        return NrollConfig(
            group=self.group_config(workers=workers),
            label=self.label,
            noise=self.noise_estimator,
            open_set=OpenSetConfig(
                enabled=self.split.open_set,
                prototypes=self.open_set.prototypes,
                tau_new=self.open_set.tau_new,
                ema=self.open_set.ema,
            ),
            eval=self.eval,
            hidden=self.model.hidden,
            embed_dim=self.model.embed_dim,
            pretrain_iterations=self.nroll.pretrain_iterations,
            loop_iterations=self.nroll.loop_iterations,
            initial_r_percent=self.nroll.initial_r_percent,
            max_r_percent=self.nroll.max_r_percent,
        )

    def layer_sizes(self, d_in: int) -> list[int]:
        return [d_in, *self.model.hidden, self.model.embed_dim]

    def with_runs_dir(self, runs_dir: str | Path) -> "ExperimentConfig":
        return dataclasses.replace(self, runs_dir=str(runs_dir))

    def run_dir(self) -> Path:
        if self.runs_dir is None:
            raise ValueError("runs_dir is not resolved")
        return Path(self.runs_dir) / self.name

    def to_json(self) -> dict[str, Any]:
        return to_dict(self)


def load_experiment_config(
    path: Optional[str | Path] = None, overrides: Sequence[str] = ()
) -> ExperimentConfig:
    """Defaults, then the config file (if any), then `--set` overrides in order."""
    raw = load_mapping(path) if path is not None else {}
    return from_dict(ExperimentConfig, apply_overrides(raw, overrides))
