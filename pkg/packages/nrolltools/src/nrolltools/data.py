"""Turn the dataset/noise/split sections of an ExperimentConfig into the sets a run trains on."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from nroll.datasets import (
    LabelledSet,
    UnlabelledPart,
    gen_synthetic,
    holdout,
    inject_noise,
    load_csv,
    split_manifest,
    split_open_set,
    split_parts,
    write_csv,
)
from nrollpyutils.cfgio import dumpf

from .config import ExperimentConfig
from .constants import SPLIT_MANIFEST

log = logging.getLogger(__name__)

# offsets from the experiment seed, one stream per stage
_HOLDOUT_SEED = 1
_NOISE_SEED = 2
_SPLIT_SEED = 3


@dataclass(frozen=True)
class ExperimentData:
    train: LabelledSet  # every training sample, noisy labels, ground truth kept
    test: Optional[LabelledSet]
    labelled: LabelledSet  # seed part
    parts: list[UnlabelledPart]
    class_map: Optional[dict[int, int]] = None  # open-set only: original class -> seed class
    unseen: tuple[int, ...] = ()

    def manifest(self) -> dict[str, Any]:
        extra: dict[str, Any] = {"test": [] if self.test is None else [int(i) for i in self.test.ids]}
        if self.class_map is not None:
            extra["class_map"] = {str(k): v for k, v in sorted(self.class_map.items())}
            extra["unseen"] = list(self.unseen)
        return split_manifest(self.labelled, self.parts, **extra)


def load_source(cfg: ExperimentConfig) -> LabelledSet:
    ds = cfg.dataset
    if ds.kind == "csv":
        assert ds.path is not None
        return load_csv(ds.path)
    return gen_synthetic(
        classes=ds.classes, per_class=ds.per_class, d_in=ds.d_in, intra_spread=ds.intra_spread, seed=cfg.seed
    )


def build_data(cfg: ExperimentConfig) -> ExperimentData:
    full = load_source(cfg)
    train, test = holdout(full, cfg.dataset.test_per_class, seed=cfg.seed + _HOLDOUT_SEED)
    noisy = inject_noise(train, cfg.noise.rate, cfg.noise.mode, seed=cfg.seed + _NOISE_SEED)
    log.info(
        "dataset: %d train (measured noise %s), %d test",
        len(noisy), f"{noisy.noise_fraction():.4f}" if noisy.has_truth else "unknown", len(test),
    )
    test_set = test if len(test) else None
    if cfg.split.open_set:
        s = split_open_set(noisy, cfg.split.parts, seed=cfg.seed + _SPLIT_SEED, seen_fraction=cfg.split.seen_fraction)
        return ExperimentData(
            train=noisy, test=test_set, labelled=s.labelled, parts=s.parts, class_map=s.class_map, unseen=s.unseen
        )
    labelled, parts = split_parts(noisy, cfg.split.parts, seed=cfg.seed + _SPLIT_SEED)
    return ExperimentData(train=noisy, test=test_set, labelled=labelled, parts=parts)


def write_data(data: ExperimentData, out_dir: str | Path) -> list[Path]:
    """train.csv, test.csv (when there is a test set) and the split manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [write_csv(data.train, out / "train.csv")]
    if data.test is not None:
        written.append(write_csv(data.test, out / "test.csv"))
    written.append(dumpf(data.manifest(), out / SPLIT_MANIFEST))
    return written
