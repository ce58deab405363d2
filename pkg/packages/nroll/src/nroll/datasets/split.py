"""Per-class stratified splits: held-out test set, S+1 parts, and the open-set variant."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import ClassTooSmallError, DatasetError
from .labelled import LabelledSet
from .unlabelled import UnlabelledPart

log = logging.getLogger(__name__)


def _true_labels(data: LabelledSet) -> np.ndarray:
    return np.where(data.gt_labels >= 0, data.gt_labels, data.labels)


def _per_class_chunks(members: np.ndarray, parts: int, offset: int) -> list[np.ndarray]:
    """Split `members` into `parts` chunks; the remainder goes one each to parts offset, offset+1, ..."""
    base, rem = divmod(members.size, parts)
    sizes = np.full(parts, base)
    sizes[(offset + np.arange(rem)) % parts] += 1
    return np.split(members, np.cumsum(sizes)[:-1])


def _stratified(
    data: LabelledSet, classes: np.ndarray, parts: int, rng: np.random.Generator, offset: int = 0
) -> tuple[list[list[np.ndarray]], int]:
    truth = _true_labels(data)
    chunks: list[list[np.ndarray]] = [[] for _ in range(parts)]
    for c in classes:
        members = rng.permutation(np.flatnonzero(truth == c))
        for p, chunk in enumerate(_per_class_chunks(members, parts, offset)):
            chunks[p].append(chunk)
        offset = (offset + members.size % parts) % parts
    return chunks, offset


def _cat(rows: list[np.ndarray]) -> np.ndarray:
    return np.sort(np.concatenate(rows)) if rows else np.empty(0, dtype=np.int64)


def _check_sizes(data: LabelledSet, classes: np.ndarray, needed: int) -> None:
    counts = np.bincount(_true_labels(data), minlength=int(classes.max()) + 1 if classes.size else 0)
    small = [int(c) for c in classes if counts[c] < needed]
    if small:
        raise ClassTooSmallError(small, needed)


def holdout(data: LabelledSet, per_class: int, seed: int = 0) -> tuple[LabelledSet, LabelledSet]:
    """Hold out `per_class` samples of every true class as a clean test set."""
    if per_class <= 0:
        return data, data.subset(np.empty(0, dtype=np.int64))
    classes = np.unique(_true_labels(data))
    _check_sizes(data, classes, per_class + 1)
    rng = np.random.default_rng(seed)
    truth = _true_labels(data)
    test_rows = np.sort(np.concatenate([rng.permutation(np.flatnonzero(truth == c))[:per_class] for c in classes]))
    train_rows = np.setdiff1d(np.arange(len(data)), test_rows)
    test = data.subset(test_rows)
    return data.subset(train_rows), test.with_labels(_true_labels(test))


def _to_part(data: LabelledSet, rows: np.ndarray, index: int) -> UnlabelledPart:
    return UnlabelledPart(data.ids[rows], data.features[rows], truth=_true_labels(data)[rows], index=index)


def split_parts(data: LabelledSet, parts: int, seed: int = 0) -> tuple[LabelledSet, list[UnlabelledPart]]:
    """
    Split every class evenly into `parts` (= S + 1) chunks.

    Part 0 keeps its labels and becomes the seed labelled set; parts 1..S lose them.
    Remainders are handed out round-robin so per-class part sizes differ by at most one.
    """
    if parts < 1:
        raise ValueError(f"parts must be >= 1, got {parts}")
    classes = np.unique(_true_labels(data))
    _check_sizes(data, classes, parts)
    chunks, _ = _stratified(data, classes, parts, np.random.default_rng(seed))
    labelled = data.subset(_cat(chunks[0]))
    unlabelled = [_to_part(data, _cat(chunks[p]), p) for p in range(1, parts)]
    log.info(
        "split %d samples into %d labelled + %s unlabelled",
        len(data), len(labelled), [len(p) for p in unlabelled],
    )
    return labelled, unlabelled


@dataclass(frozen=True)
class OpenSetSplit:
    labelled: LabelledSet
    parts: list[UnlabelledPart]
    class_map: dict[int, int]  # original class id -> labelled-set class id (seen classes only)
    unseen: tuple[int, ...] = field(default_factory=tuple)


def split_open_set(data: LabelledSet, parts: int, seed: int = 0, seen_fraction: float = 0.5) -> OpenSetSplit:
    """
    Open-set variant of split_parts: the labelled part covers only `seen_fraction` of the
    classes (renumbered 0..K-1); every unlabelled part holds both seen and unseen classes.
    """
    if parts < 2:
        raise ValueError(f"open-set split needs at least one unlabelled part, got parts={parts}")
    if not (0.0 < seen_fraction < 1.0):
        raise ValueError(f"seen_fraction must be in (0, 1), got {seen_fraction}")
    classes = np.unique(_true_labels(data))
    rng = np.random.default_rng(seed)
    n_seen = max(1, int(round(seen_fraction * classes.size)))
    if n_seen >= classes.size:
        raise DatasetError(f"open-set split needs at least one unseen class ({classes.size} classes)")
    seen = np.sort(rng.choice(classes, size=n_seen, replace=False))
    unseen = np.setdiff1d(classes, seen)
    _check_sizes(data, seen, parts)
    _check_sizes(data, unseen, parts - 1)

    seen_chunks, offset = _stratified(data, seen, parts, rng)
    unseen_chunks, _ = _stratified(data, unseen, parts - 1, rng, offset % (parts - 1))

    class_map = {int(c): i for i, c in enumerate(seen)}
    seed_rows = _cat(seen_chunks[0])
    seed_set = data.subset(seed_rows)
    remap = np.vectorize(lambda c: class_map.get(int(c), -1), otypes=[np.int64])
    labelled = LabelledSet(
        ids=seed_set.ids,
        features=seed_set.features,
        labels=remap(_true_labels(seed_set)) if len(seed_set) else seed_set.labels,
        gt_labels=remap(_true_labels(seed_set)) if len(seed_set) else seed_set.gt_labels,
        provenance=seed_set.provenance,
        num_classes=len(seen),
    )
    unlabelled = [
        _to_part(data, _cat(seen_chunks[p] + unseen_chunks[p - 1]), p) for p in range(1, parts)
    ]
    log.info("open-set split: %d seen classes, %d unseen", len(seen), len(unseen))
    return OpenSetSplit(labelled=labelled, parts=unlabelled, class_map=class_map, unseen=tuple(int(c) for c in unseen))


def split_manifest(labelled: LabelledSet, parts: list[UnlabelledPart], **extra: Any) -> dict[str, Any]:
    """Part -> id list mapping, JSON-ready."""
    manifest: dict[str, Any] = {
        "labelled": [int(i) for i in labelled.ids],
        "parts": {str(p.index): [int(i) for i in p.ids] for p in parts},
    }
    manifest.update(extra)
    return manifest
