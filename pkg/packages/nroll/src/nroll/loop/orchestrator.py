"""
The learn-label loop: pretrain the group on the seed set, then for every unlabelled part
label the confident samples, merge them, re-estimate the noise rate and keep training.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from ..datasets import LabelledSet, UnlabelledPart
from ..errors import DivergedError
from ..eval import EvalReport, evaluate_agents, identity_purity, pseudo_label_accuracy
from ..eval.truth import has_hidden_truth, hidden_truth
from ..groupnet import IterationRecord, gn_train, init_agents
from ..learner import Agent, predict
from ..noise import NoiseEstimate, estimate_noise_rate
from .config import NrollConfig
from .labelling import LabelOutcome, PseudoLabels, label_part
from .prototypes import PrototypeBank, open_set_label_part
from .update import update_labelled

log = logging.getLogger(__name__)

LOOPS_CSV_COLUMNS = (
    "t",
    "labelled_size",
    "r_est",
    "confident_fraction",
    "pseudo_acc",
    "test_acc",
    "verification_acc",
    "rank1",
    "added",
    "dropped",
    "threshold",
    "r_train",
    "new_identities",
)


@dataclass(frozen=True)
class LoopMetrics:
    t: int
    labelled_size: int
    r_est: float  # percent, as estimated (never clamped)
    r_train: float  # percent used for training
    threshold: float
    added: int = 0
    dropped: int = 0
    confident_fraction: Optional[float] = None
    pseudo_acc: Optional[float] = None
    pseudo_coverage: Optional[float] = None
    pseudo_empty: Optional[bool] = None
    part_acc: Optional[float] = None  # classifier accuracy on the whole part, before filtering
    test_acc: Optional[float] = None
    verification_acc: Optional[float] = None
    rank1: Optional[float] = None
    labelled_noise: Optional[float] = None
    new_identities: int = 0
    purity: Optional[float] = None
    degenerate_fit: bool = False

    def to_json(self) -> dict:
        return asdict(self)

    def csv_row(self) -> dict:
        d = self.to_json()
        return {k: d[k] for k in LOOPS_CSV_COLUMNS}


@dataclass
class LoopState:
    t: int
    labelled: LabelledSet
    remaining: list[UnlabelledPart]
    r_percent: float
    threshold: float
    metrics: list[LoopMetrics] = field(default_factory=list)
    dropped: dict[int, list[int]] = field(default_factory=dict)
    events: list[str] = field(default_factory=list)
    zero_add_streak: int = 0
    threshold_lowered: bool = False

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "labelled_size": len(self.labelled),
            "remaining_parts": [p.index for p in self.remaining],
            "r_percent": self.r_percent,
            "threshold": self.threshold,
            "events": list(self.events),
        }


@dataclass
class NrollResult:
    agents: list[Agent]
    labelled: LabelledSet
    metrics: list[LoopMetrics]
    state: LoopState
    estimates: list[NoiseEstimate]
    bank: Optional[PrototypeBank] = None

    @property
    def dropped(self) -> dict[int, list[int]]:
        return self.state.dropped

    @property
    def events(self) -> list[str]:
        return self.state.events


class LoopObserver:
    """Hooks called by run_nroll as it goes; the default does nothing."""

    def on_record(self, t: int, record: IterationRecord) -> None:
        pass

    def on_estimate(self, t: int, estimate: NoiseEstimate) -> None:
        pass

    def on_loop(self, state: LoopState, metrics: LoopMetrics, agents: list[Agent]) -> None:
        pass


def _pseudo_scores(
    outcomes: Sequence[tuple[UnlabelledPart, LabelOutcome]],
    class_map: Optional[Mapping[int, int]],
    first_new_class: Optional[int],
) -> tuple[Optional[float], Optional[float], Optional[bool]]:
    correct = accepted = total = 0
    for part, outcome in outcomes:
        if not has_hidden_truth(part):
            return None, None, None
        score = pseudo_label_accuracy(outcome.pseudo.ids, outcome.pseudo.labels, part, class_map, first_new_class)
        correct += score.correct
        accepted += score.accepted
        total += score.total
    if accepted == 0:
        return 1.0, 0.0, True
    return correct / accepted, accepted / total if total else 0.0, False


def _pseudo_truth(outcomes: Sequence[tuple[UnlabelledPart, LabelOutcome]]) -> np.ndarray:
    """Hidden truth of the accepted samples, in the order they were pseudo labelled."""
    out = []
    for part, outcome in outcomes:
        order = np.argsort(part.ids)
        pos = order[np.searchsorted(part.ids, outcome.pseudo.ids, sorter=order)]
        out.append(hidden_truth(part)[pos])
    return np.concatenate(out) if out else np.empty(0, dtype=np.int64)


def _part_accuracy(agents: list[Agent], parts: Sequence[UnlabelledPart], cfg: NrollConfig) -> Optional[float]:
    if cfg.open_set.enabled or not parts or not all(has_hidden_truth(p) for p in parts):
        return None
    hits = sum(int(np.sum(predict(agents[0].params, p.features, cfg.group.margin) == hidden_truth(p))) for p in parts)
    n = sum(len(p) for p in parts)
    return hits / n if n else None


def _estimate(t: int, data: LabelledSet, agents: list[Agent], cfg: NrollConfig, rng, observer) -> NoiseEstimate:
    est = estimate_noise_rate(data, agents[cfg.eval.agent_index].embed, cfg.noise, rng)
    observer.on_estimate(t, est)
    return est


def _evaluate(agents: list[Agent], test: Optional[LabelledSet], cfg: NrollConfig) -> Optional[EvalReport]:
    if test is None:
        return None
    # an open-set split renumbers the seed classes, so head predictions are not comparable to test ids
    return evaluate_agents(agents, test, cfg.group.margin, cfg.eval, closed_set=not cfg.open_set.enabled)


def run_nroll(
    cfg: NrollConfig,
    labelled: LabelledSet,
    parts: Sequence[UnlabelledPart],
    test: Optional[LabelledSet] = None,
    observer: Optional[LoopObserver] = None,
    class_map: Optional[Mapping[int, int]] = None,
) -> NrollResult:
    """
    Run the whole loop and return the final agents, labelled set and one LoopMetrics per loop
    (t = 0 is the pretrain on the seed set).

    Parts are consumed in the order given, cfg.label.parts_per_loop at a time. Training carries
    the agents' parameters over from loop to loop. On divergence the DivergedError carries the
    LoopState reached so far in its `state` attribute.
    """
    observer = observer or LoopObserver()
    if len(labelled) == 0:
        raise ValueError("the seed labelled set is empty")
    train_seq, noise_seq = np.random.SeedSequence(cfg.group.seed).spawn(2)
    train_rng = np.random.default_rng(train_seq)
    noise_rng = np.random.default_rng(noise_seq)
    agents = init_agents(cfg.group, cfg.layer_sizes(labelled.dim), labelled.num_classes)
    bank = PrototypeBank.for_agents(agents, cfg.open_set) if cfg.open_set.uses_prototypes else None
    estimates: list[NoiseEstimate] = []

    state = LoopState(
        t=0,
        labelled=labelled,
        remaining=list(parts),
        r_percent=0.0 if cfg.initial_r_percent is None else cfg.initial_r_percent,
        threshold=cfg.label.threshold,
    )

    def clamp(r_percent: float) -> float:
        return min(r_percent, cfg.max_r_percent)

    def record_event(message: str) -> None:
        log.warning(message)
        state.events.append(message)

    def train(t: int, r_percent: float, hook=None) -> float:
        group = replace(cfg.group, r_percent=clamp(r_percent))
        iterations = cfg.pretrain_iterations if t == 0 else cfg.loop_iterations
        try:
            result = gn_train(
                agents, state.labelled, group, iterations, rng=train_rng,
                on_warmup_end=hook, on_record=lambda rec: observer.on_record(t, rec),
            )
        except DivergedError as e:
            e.state = state
            record_event(f"loop {t}: {e}")
            raise
        for ev in result.events:
            state.events.append(f"loop {t}: {ev}")
        return result.r_percent

    # pretrain
    pre_estimate: list[NoiseEstimate] = []
    if cfg.initial_r_percent is None:

        def estimate_after_warmup(current: list[Agent]) -> float:
            est = _estimate(0, state.labelled, current, cfg, noise_rng, observer)
            pre_estimate.append(est)
            return clamp(est.r_percent)

        r_train = train(0, 0.0, estimate_after_warmup)
        state.r_percent = pre_estimate[0].r_percent if pre_estimate else 0.0
    else:
        r_train = train(0, cfg.initial_r_percent)
    estimates.extend(pre_estimate)
    if pre_estimate and pre_estimate[0].degenerate:
        record_event("loop 0: degenerate GMM fit; noise rate taken as 0")

    report = _evaluate(agents, test, cfg)
    metrics = LoopMetrics(
        t=0,
        labelled_size=len(state.labelled),
        r_est=state.r_percent,
        r_train=r_train,
        threshold=state.threshold,
        test_acc=report.test_accuracy if report else None,
        verification_acc=report.verification_accuracy if report else None,
        rank1=report.rank1 if report else None,
        labelled_noise=state.labelled.noise_fraction(),
        degenerate_fit=bool(pre_estimate and pre_estimate[0].degenerate),
    )
    state.metrics.append(metrics)
    observer.on_loop(state, metrics, agents)

    t = 0
    while state.remaining:
        t += 1
        state.t = t
        batch = state.remaining[: cfg.label.parts_per_loop]
        part_acc = _part_accuracy(agents, batch, cfg)
        before_bank = len(bank) if bank is not None else 0

        outcomes: list[tuple[UnlabelledPart, LabelOutcome]] = []
        for part in batch:
            if bank is not None:
                outcome = open_set_label_part(agents, part, bank, cfg.label, cfg.group.margin, state.threshold)
            else:
                outcome = label_part(agents, part, cfg.label, cfg.group.margin, state.threshold)
            outcomes.append((part, outcome))
            state.dropped[part.index] = [int(i) for i in outcome.dropped]
        state.remaining = state.remaining[len(batch):]

        d = state.labelled.dim
        pseudo = PseudoLabels.concat([o.pseudo for _, o in outcomes], d)
        num_classes = agents[0].params.num_classes
        state.labelled = update_labelled(state.labelled, pseudo, t, num_classes=num_classes)

        est = _estimate(t, state.labelled, agents, cfg, noise_rng, observer)
        estimates.append(est)
        if est.degenerate:
            record_event(f"loop {t}: degenerate GMM fit; noise rate taken as 0")
        state.r_percent = est.r_percent
        r_train = train(t, est.r_percent)

        total = sum(o.total for _, o in outcomes)
        precision, coverage, empty = _pseudo_scores(
            outcomes, class_map, bank.first_id if bank is not None else None
        )
        new_ids = (len(bank) - before_bank) if bank is not None else 0
        purity = None
        if bank is not None and all(has_hidden_truth(p) for p, _ in outcomes):
            new_rows = pseudo.labels >= bank.first_id
            if new_rows.any():
                truth = _pseudo_truth(outcomes)
                purity = identity_purity(pseudo.labels[new_rows], truth[new_rows])

        report = _evaluate(agents, test, cfg)
        metrics = LoopMetrics(
            t=t,
            labelled_size=len(state.labelled),
            r_est=est.r_percent,
            r_train=r_train,
            threshold=state.threshold,
            added=len(pseudo),
            dropped=total - len(pseudo),
            confident_fraction=len(pseudo) / total if total else 0.0,
            pseudo_acc=precision,
            pseudo_coverage=coverage,
            pseudo_empty=empty,
            part_acc=part_acc,
            test_acc=report.test_accuracy if report else None,
            verification_acc=report.verification_accuracy if report else None,
            rank1=report.rank1 if report else None,
            labelled_noise=state.labelled.noise_fraction(),
            new_identities=new_ids,
            purity=purity,
            degenerate_fit=est.degenerate,
        )
        state.metrics.append(metrics)
        log.info(
            "loop %d: |D_l|=%d (+%d), r=%.2f%%, threshold %.3f",
            t, metrics.labelled_size, metrics.added, metrics.r_est, state.threshold,
        )

        state.zero_add_streak = state.zero_add_streak + 1 if len(pseudo) == 0 else 0
        if (
            state.zero_add_streak >= cfg.label.lower_after
            and state.remaining
            and not state.threshold_lowered
        ):
            lowered = max(cfg.label.threshold_floor, state.threshold - cfg.label.lower_step)
            record_event(
                f"loop {t}: nothing labelled for {state.zero_add_streak} loops; "
                f"threshold lowered from {state.threshold:.3f} to {lowered:.3f}"
            )
            state.threshold = lowered
            state.threshold_lowered = True
        observer.on_loop(state, metrics, agents)

    return NrollResult(
        agents=agents, labelled=state.labelled, metrics=state.metrics, state=state, estimates=estimates, bank=bank
    )
