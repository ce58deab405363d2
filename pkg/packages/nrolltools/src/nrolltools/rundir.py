"""
Run directory writer.

Layout of runs/<name>/:
    config.resolved.json        fully-resolved config (sorted keys)
    train.jsonl                 one object per training iteration, tagged with its loop t
    events.jsonl                warnings worth keeping (threshold lowering, degenerate fits, ...)
    loops.csv                   one row per learn-label loop (t >= 1)
    loop_<t>/agent_<m>.gnckpt   group checkpoint after loop t
    loop_<t>/similarity_hist.csv
    report.json, report.md
    run.log
    abort.json                  only when training diverged
"""

from __future__ import annotations

import csv
import json
import logging
import shutil
from pathlib import Path
from typing import IO, Any, Iterable, Optional, Sequence

import numpy as np

from nroll.learner import Agent, MarginConfig, save_checkpoint
from nroll.noise import similarity_histogram
from nrollpyutils.cfgio import dumpf
from nrollpyutils.file_utils import open_write_iff_change, write_text_atomic

from .config import ExperimentConfig
from .constants import (
    ABORT_JSON,
    CHECKPOINT_SUFFIX,
    EVENTS_LOG,
    LOOPS_CSV,
    RESOLVED_CONFIG,
    RUN_LOG,
    SIMILARITY_HIST,
    TRAIN_LOG,
)

log = logging.getLogger(__name__)

# artifacts a rerun replaces; data/ and anything else in the directory is left alone
_OWNED_FILES = (TRAIN_LOG, EVENTS_LOG, LOOPS_CSV, ABORT_JSON, RUN_LOG)


def json_default(o: Any) -> Any:
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def json_line(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, default=json_default) + "\n"


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class RunDir:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._streams: dict[str, IO[str]] = {}

    @classmethod
    def for_config(cls, cfg: ExperimentConfig) -> "RunDir":
        return cls(cfg.run_dir())

    def __enter__(self) -> "RunDir":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    @property
    def run_log(self) -> Path:
        return self.path / RUN_LOG

    def prepare(self) -> "RunDir":
        """Create the directory and clear what a previous run of the same name wrote."""
        self.path.mkdir(parents=True, exist_ok=True)
        for name in _OWNED_FILES:
            (self.path / name).unlink(missing_ok=True)
        for d in self.path.glob("loop_*"):
            if d.is_dir():
                shutil.rmtree(d)
        return self

    def close(self) -> None:
        for f in self._streams.values():
            f.close()
        self._streams.clear()

    def _stream(self, name: str) -> IO[str]:
        if name not in self._streams:
            self._streams[name] = open(self.path / name, "a", encoding="utf-8", newline="")
        return self._streams[name]

    def loop_dir(self, t: int) -> Path:
        d = self.path / f"loop_{t}"
        d.mkdir(parents=True, exist_ok=True)
        return d

    def write_config(self, cfg: ExperimentConfig) -> Path:
        return dumpf(cfg.to_json(), self.path / RESOLVED_CONFIG)

    def write_json(self, name: str, obj: Any) -> Path:
        p = self.path / name
        write_text_atomic(p, json.dumps(obj, indent=2, sort_keys=True, default=json_default) + "\n")
        return p

    def write_text(self, name: str, text: str) -> Path:
        p = self.path / name
        with open_write_iff_change(p, "w") as f:
            f.write(text)
        return p

    def log_record(self, t: int, record: Any) -> None:
        self._stream(TRAIN_LOG).write(json_line({"t": t, **record.to_json()}))

    def log_event(self, t: int, message: str) -> None:
        f = self._stream(EVENTS_LOG)
        f.write(json_line({"t": t, "message": message}))
        f.flush()

    def start_loops_csv(self, columns: Sequence[str]) -> None:
        self._loops_columns = list(columns)
        self._stream(LOOPS_CSV).write(",".join(self._loops_columns) + "\n")

    def log_loop_row(self, row: dict[str, Any]) -> None:
        f = self._stream(LOOPS_CSV)
        csv.writer(f, lineterminator="\n").writerow([_csv_cell(row.get(c)) for c in self._loops_columns])
        f.flush()

    def save_agents(self, t: int, agents: Iterable[Agent], margin: MarginConfig) -> list[Path]:
        d = self.loop_dir(t)
        return [save_checkpoint(d / f"agent_{a.index}{CHECKPOINT_SUFFIX}", a.params, margin) for a in agents]

    def write_histogram(self, t: Optional[int], similarities: Optional[np.ndarray]) -> Optional[Path]:
        """100-bin histogram over [-1, 1]; in loop_<t>/ or, with t None, the run directory itself."""
        if similarities is None:
            return None
        centres, counts = similarity_histogram(similarities)
        lines = ["bin_center,count"] + [f"{c:.2f},{int(n)}" for c, n in zip(centres, counts)]
        p = (self.path if t is None else self.loop_dir(t)) / SIMILARITY_HIST
        write_text_atomic(p, "\n".join(lines) + "\n")
        return p

    def write_abort(self, error: BaseException, state: Any = None) -> Path:
        """abort.json beside the last saved checkpoints: the error and the loop state reached."""
        saved = sorted(
            (int(d.name.split("_", 1)[1]) for d in self.path.glob("loop_*") if any(d.glob(f"*{CHECKPOINT_SUFFIX}"))),
        )
        payload = {
            "error": str(error),
            "kind": type(error).__name__,
            "last_checkpoint_loop": saved[-1] if saved else None,
            "state": state.to_json() if state is not None and hasattr(state, "to_json") else None,
        }
        log.error("run aborted: %s", error)
        return self.write_json(ABORT_JSON, payload)
