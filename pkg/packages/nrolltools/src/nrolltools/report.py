from __future__ import annotations

from typing import Any, Optional

from jinja2 import Template

from .config import ExperimentConfig
from .report_template import DEFAULT_REPORT_TEMPLATE


def _pct(v: Optional[float]) -> str:
    return "n/a" if v is None else f"{100.0 * v:.2f}%"


def build_report(
    cfg: ExperimentConfig,
    command: str,
    final: Optional[dict[str, Any]] = None,
    loops: Optional[list[dict[str, Any]]] = None,
    events: Optional[list[str]] = None,
    **extra: Any,
) -> dict[str, Any]:
    """The report.json payload; `extra` adds command-specific keys."""
    report: dict[str, Any] = {
        "name": cfg.name,
        "command": command,
        "seed": cfg.seed,
        "rate_mode": cfg.noise_estimator.rate_mode,
        "final": final,
        "loops": loops or [],
        "events": events or [],
    }
    report.update(extra)
    return report


def render_report_md(cfg: ExperimentConfig, report: dict[str, Any], template: str = DEFAULT_REPORT_TEMPLATE) -> str:
    t = Template(template, keep_trailing_newline=True, trim_blocks=True)
    return t.render(
        pct=_pct,
        dataset=cfg.dataset,
        noise=cfg.noise,
        group=cfg.group,
        estimator=cfg.noise_estimator,
        agent_index=cfg.eval.agent_index,
        r_percent=report.get("r_percent"),
        **{k: v for k, v in report.items() if k != "r_percent"},
    )
