"""
What each `nroll` subcommand does once its config is loaded and its run directory prepared.

The click layer (cli/nroll_main) only parses arguments and maps exceptions to exit codes.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import re
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterator, Optional

import numpy as np
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from nroll.baseline import train_baseline
from nroll.errors import CheckpointError, ConfigValidationError, DivergedError
from nroll.eval import EvalReport, evaluate_agents
from nroll.groupnet import IterationRecord, gn_train, init_agents
from nroll.learner import Agent, MarginConfig, embed_batch, identity_encoder, load_checkpoint
from nroll.loop import LOOPS_CSV_COLUMNS, LoopMetrics, LoopObserver, LoopState, run_nroll
from nroll.noise import NoiseEstimate, estimate_noise_rate

from .config import ExperimentConfig
from .constants import CHECKPOINT_SUFFIX, DATA_DIR, ESTIMATE_JSON, EVAL_JSON, REPORT_JSON, REPORT_MD, ROC_CSV
from .data import build_data, write_data
from .display import display_estimate, display_eval, display_loops
from .report import build_report, render_report_md
from .rundir import RunDir

log = logging.getLogger(__name__)

_AGENT_FILE = re.compile(r"^agent_(\d+)" + re.escape(CHECKPOINT_SUFFIX) + "$")


@contextmanager
def iteration_progress(console: Console, total: int, description: str) -> Iterator[Callable[[], None]]:
    """Yield a callback that advances a progress bar by one iteration; silent off a terminal."""
    progress = Progress(
        TextColumn("[bold blue]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=True,
        disable=console.quiet or not console.is_terminal,
    )
    with progress:
        task = progress.add_task(description, total=total)
        yield lambda: progress.advance(task)


def _seed_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    train_seq, noise_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(train_seq), np.random.default_rng(noise_seq)


def _finish(
    cfg: ExperimentConfig, rundir: RunDir, console: Console, command: str, final: Optional[EvalReport], **extra
) -> dict:
    final_json = final.to_json() if final is not None else None
    report = build_report(cfg, command, final=final_json, **extra)
    rundir.write_json(REPORT_JSON, report)
    rundir.write_text(REPORT_MD, render_report_md(cfg, report))
    if report["loops"]:
        display_loops(console, report["loops"])
    display_eval(console, final_json)
    console.print(f"run directory: [bold green]{rundir.path}[/bold green]", highlight=False)
    return report


###############################################################################
#
# gen-data
#
###############################################################################

def gen_data_impl(cfg: ExperimentConfig, rundir: RunDir, console: Console) -> list[Path]:
    data = build_data(cfg)
    written = write_data(data, rundir.path / DATA_DIR)
    for p in written:
        log.info("wrote %s", p)
    console.print(
        f"{len(data.train)} training samples ({len(data.labelled)} labelled seed, "
        f"{len(data.parts)} unlabelled parts), {0 if data.test is None else len(data.test)} test samples",
        highlight=False,
    )
    for p in written:
        console.print(f"  [green]{p}[/green]", highlight=False)
    return written


###############################################################################
#
# train / train --baseline
#
###############################################################################

def train_impl(
    cfg: ExperimentConfig,
    rundir: RunDir,
    console: Console,
    baseline: bool = False,
    workers: Optional[int] = None,
) -> dict:
    """Train on the whole noisy training set (no learn-label loop) and evaluate on the test set."""
    data = build_data(cfg)
    train_set = data.train
    layer_sizes = cfg.layer_sizes(train_set.dim)
    train_rng, noise_rng = _seed_streams(cfg.seed)
    estimates: list[NoiseEstimate] = []
    r_fixed = cfg.train.r_percent

    def estimate_after_warmup(agents: list[Agent]) -> float:
        est = estimate_noise_rate(train_set, agents[cfg.eval.agent_index].embed, cfg.noise_estimator, noise_rng)
        estimates.append(est)
        rundir.write_histogram(0, est.similarities)
        return min(est.r_percent, cfg.nroll.max_r_percent)

    with iteration_progress(console, cfg.train.iterations, "baseline" if baseline else "train") as advance:

        def on_record(rec: IterationRecord) -> None:
            rundir.log_record(0, rec)
            advance()

        try:
            if baseline:
                group = cfg.group_config(workers=workers)
                result = train_baseline(train_set, layer_sizes, group, cfg.train.iterations, rng=train_rng, on_record=on_record)
            else:
                group = cfg.group_config(r_percent=r_fixed or 0.0, workers=workers)
                agents = init_agents(group, layer_sizes, train_set.num_classes)
                result = gn_train(
                    agents, train_set, group, cfg.train.iterations, rng=train_rng,
                    on_warmup_end=estimate_after_warmup if r_fixed is None else None,
                    on_record=on_record,
                )
        except DivergedError as e:
            rundir.log_event(0, str(e))
            rundir.write_abort(e, e.state)
            raise

    for ev in result.events:
        rundir.log_event(0, ev)
    rundir.save_agents(0, result.agents, cfg.group.margin)

    eval_cfg = dataclasses.replace(cfg.eval, agent_index=0) if baseline else cfg.eval
    final = (
        evaluate_agents(result.agents, data.test, cfg.group.margin, eval_cfg)
        if data.test is not None
        else None
    )
    return _finish(
        cfg, rundir, console, "train --baseline" if baseline else "train", final,
        events=result.events,
        r_percent=result.r_percent,
        iterations=cfg.train.iterations,
        estimates=[e.to_json() for e in estimates],
        measured_noise=train_set.noise_fraction(),
    )


###############################################################################
#
# nroll
#
###############################################################################

class RunObserver(LoopObserver):
    """Streams the loop's records, histograms, checkpoints and loops.csv rows into the run directory."""

    def __init__(self, rundir: RunDir, margin: MarginConfig, advance: Callable[[], None]):
        self.rundir = rundir
        self.margin = margin
        self.advance = advance
        self._events_logged = 0

    def on_record(self, t: int, record: IterationRecord) -> None:
        self.rundir.log_record(t, record)
        self.advance()

    def on_estimate(self, t: int, estimate: NoiseEstimate) -> None:
        self.rundir.write_histogram(t, estimate.similarities)

    def flush_events(self, state: LoopState) -> None:
        for message in state.events[self._events_logged:]:
            self.rundir.log_event(state.t, message)
        self._events_logged = len(state.events)

    def on_loop(self, state: LoopState, metrics: LoopMetrics, agents: list[Agent]) -> None:
        self.flush_events(state)
        if metrics.t >= 1:
            self.rundir.log_loop_row(metrics.csv_row())
        self.rundir.save_agents(metrics.t, agents, self.margin)


def nroll_impl(cfg: ExperimentConfig, rundir: RunDir, console: Console, workers: Optional[int] = None) -> dict:
    data = build_data(cfg)
    ncfg = cfg.nroll_config(workers=workers)
    loops = math.ceil(len(data.parts) / cfg.label.parts_per_loop)
    total = ncfg.pretrain_iterations + loops * ncfg.loop_iterations
    rundir.start_loops_csv(LOOPS_CSV_COLUMNS)

    with iteration_progress(console, total, "nroll") as advance:
        observer = RunObserver(rundir, cfg.group.margin, advance)
        try:
            result = run_nroll(ncfg, data.labelled, data.parts, data.test, observer, data.class_map)
        except DivergedError as e:
            if isinstance(e.state, LoopState):
                observer.flush_events(e.state)
            rundir.write_abort(e, e.state)
            raise

    final = (
        evaluate_agents(result.agents, data.test, cfg.group.margin, cfg.eval, closed_set=not cfg.split.open_set)
        if data.test is not None
        else None
    )
    return _finish(
        cfg, rundir, console, "nroll", final,
        loops=[m.to_json() for m in result.metrics],
        events=result.events,
        labelled_size=len(result.labelled),
        labelled_noise=result.labelled.noise_fraction(),
        dropped={str(k): v for k, v in sorted(result.dropped.items())},
        estimates=[e.to_json() for e in result.estimates],
        prototypes=result.bank.to_json() if result.bank is not None else None,
    )


###############################################################################
#
# checkpoints: estimate-noise --checkpoint, evaluate --checkpoint
#
###############################################################################

def _checkpoint_files(path: Path) -> list[Path]:
    if path.is_file():
        return [path]
    if not path.is_dir():
        raise CheckpointError(f"no checkpoint at {path}")
    found = sorted(
        ((int(m.group(1)), p) for p in path.iterdir() if (m := _AGENT_FILE.match(p.name))),
        key=lambda x: x[0],
    )
    if not found:
        raise CheckpointError(f"no agent_<m>{CHECKPOINT_SUFFIX} files in {path}")
    return [p for _, p in found]


def load_agents(path: str | Path, d_in: int) -> tuple[list[Agent], MarginConfig]:
    """Agents from one checkpoint file or from every agent_<m> file of a loop directory."""
    agents: list[Agent] = []
    margin: Optional[MarginConfig] = None
    for m, p in enumerate(_checkpoint_files(Path(path))):
        params, header = load_checkpoint(p)
        if header.layer_sizes[0] != d_in:
            raise CheckpointError(f"{p}: encoder takes {header.layer_sizes[0]} inputs, dataset has {d_in}")
        margin = margin or header.margin
        agents.append(Agent(index=m, params=params, seed=-1))
    assert margin is not None
    log.info("loaded %d agent(s) from %s", len(agents), path)
    return agents, margin


def estimate_noise_impl(
    cfg: ExperimentConfig, rundir: RunDir, console: Console, checkpoint: Optional[str | Path] = None
) -> dict:
    """
    Estimate the noise rate of the noisy training set. With a checkpoint the estimate uses
    that agent's embedding; without one, the raw features (unit-normalised) are compared.
    """
    data = build_data(cfg)
    target = data.train
    if checkpoint is not None:
        agents, _ = load_agents(checkpoint, target.dim)
        index = min(cfg.eval.agent_index, len(agents) - 1)
        embedder = agents[index].embed
    else:
        encoder = identity_encoder(target.dim)

        def embedder(X: np.ndarray) -> np.ndarray:
            return embed_batch(encoder, X)

    _, noise_rng = _seed_streams(cfg.seed)
    est = estimate_noise_rate(target, embedder, cfg.noise_estimator, noise_rng)
    rundir.write_histogram(None, est.similarities)
    payload = {
        **est.to_json(),
        "measured_noise": target.noise_fraction(),
        "checkpoint": None if checkpoint is None else str(checkpoint),
    }
    rundir.write_json(ESTIMATE_JSON, payload)
    display_estimate(console, payload)
    return payload


def evaluate_impl(cfg: ExperimentConfig, rundir: RunDir, console: Console, checkpoint: str | Path) -> dict:
    data = build_data(cfg)
    if data.test is None:
        raise ConfigValidationError(["dataset.test_per_class: evaluate needs a held-out test set (> 0)"])
    agents, margin = load_agents(checkpoint, data.test.dim)
    if cfg.eval.agent_index >= len(agents):
        raise CheckpointError(f"eval.agent_index {cfg.eval.agent_index} but only {len(agents)} agent(s) in {checkpoint}")
    closed_set = not cfg.split.open_set and agents[0].params.num_classes == data.train.num_classes
    report = evaluate_agents(agents, data.test, margin, cfg.eval, closed_set=closed_set)
    payload = {**report.to_json(), "checkpoint": str(checkpoint), "agents": len(agents)}
    rundir.write_json(EVAL_JSON, payload)
    if report.roc is not None:
        rows = ["threshold,fpr,tpr"] + [f"{t!r},{f!r},{p!r}" for t, f, p in report.roc.roc_rows()]
        rundir.write_text(ROC_CSV, "\n".join(rows) + "\n")
    display_eval(console, payload, title=f"Evaluation of {checkpoint}")
    return payload
