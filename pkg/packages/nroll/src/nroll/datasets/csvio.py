"""
CSV format: header `id,label,gt_label,f0,...,f{d-1}`; gt_label may be empty. Floats are
written with repr() so a write/load round trip is exact.
"""

from __future__ import annotations

import csv
import io
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from nrollpyutils.file_utils import write_text_atomic

from ..errors import DatasetError, DatasetParseError
from .labelled import NO_TRUTH, LabelledSet

log = logging.getLogger(__name__)

FIXED_COLUMNS = ("id", "label", "gt_label")


def format_csv(data: LabelledSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(FIXED_COLUMNS) + [f"f{j}" for j in range(data.dim)])
    for i in range(len(data)):
        gt = int(data.gt_labels[i])
        w.writerow(
            [int(data.ids[i]), int(data.labels[i]), "" if gt < 0 else gt]
            + [repr(float(v)) for v in data.features[i]]
        )
    return buf.getvalue()


def write_csv(data: LabelledSet, path: str | Path) -> Path:
    p = Path(path)
    write_text_atomic(p, format_csv(data))
    log.debug("wrote %d samples to %s", len(data), p)
    return p


def _parse_header(path: Path, header: list[str]) -> int:
    if [h.strip() for h in header[:3]] != list(FIXED_COLUMNS):
        raise DatasetParseError(path, 1, f"header must start with {','.join(FIXED_COLUMNS)}")
    feats = [h.strip() for h in header[3:]]
    if not feats:
        raise DatasetParseError(path, 1, "no feature columns")
    for j, name in enumerate(feats):
        if name != f"f{j}":
            raise DatasetParseError(path, 1, f"expected column f{j}, found {name!r}")
    return len(feats)


def load_csv(path: str | Path, num_classes: Optional[int] = None) -> LabelledSet:
    """
    Parse a labelled CSV. `num_classes` defaults to the largest label (or ground truth) + 1.
    Errors name the offending line.
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetError(f"cannot read {p}: {e}") from e

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetParseError(p, 1, "missing header") from None
    d = _parse_header(p, header)

    ids: list[int] = []
    labels: list[int] = []
    gts: list[int] = []
    rows: list[list[float]] = []
    seen: dict[int, int] = {}
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != d + 3:
            raise DatasetParseError(p, line, f"expected {d + 3} fields, found {len(row)}")
        try:
            sid = int(row[0])
            label = int(row[1])
            gt = int(row[2]) if row[2].strip() else NO_TRUTH
        except ValueError as e:
            raise DatasetParseError(p, line, f"bad integer field: {e}") from None
        try:
            feats = [float(v) for v in row[3:]]
        except ValueError as e:
            raise DatasetParseError(p, line, f"non-numeric feature: {e}") from None
        if not np.all(np.isfinite(feats)):
            raise DatasetParseError(p, line, "non-finite feature")
        if label < 0:
            raise DatasetParseError(p, line, f"negative label {label}")
        if sid in seen:
            raise DatasetParseError(p, line, f"duplicate id {sid} (first on line {seen[sid]})")
        seen[sid] = line
        ids.append(sid)
        labels.append(label)
        gts.append(gt)
        rows.append(feats)

    if num_classes is None:
        num_classes = max(labels + gts, default=-1) + 1
    features = np.asarray(rows, dtype=np.float64).reshape(len(rows), d)
    log.info("loaded %d samples (d=%d, %d classes) from %s", len(ids), d, num_classes, p)
    return LabelledSet.create(ids, features, labels, num_classes=num_classes, gt_labels=gts)
