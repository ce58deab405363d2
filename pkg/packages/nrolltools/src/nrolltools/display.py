from __future__ import annotations

from typing import Any, Optional

from rich import box
from rich.console import Console
from rich.table import Table
from rich.text import Text


def _pct(v: Optional[float]) -> str:
    return "-" if v is None else f"{100.0 * v:.2f}"


def display_loops(console: Console, loops: list[dict[str, Any]], use_ascii_box: bool = False) -> None:
    table = Table(
        title=Text("Learn-label loops", style="bold white"),
        box=box.ASCII if use_ascii_box else box.ROUNDED,
        expand=False,
    )
    for col in ("t", "|D_l|", "r est %", "added", "dropped", "threshold", "pseudo acc %", "test acc %", "rank-1 %"):
        table.add_column(col, justify="right")
    for m in loops:
        table.add_row(
            str(m["t"]),
            str(m["labelled_size"]),
            f"{m['r_est']:.2f}",
            str(m["added"]),
            str(m["dropped"]),
            f"{m['threshold']:.3f}",
            _pct(m.get("pseudo_acc")),
            _pct(m.get("test_acc")),
            _pct(m.get("rank1")),
        )
    console.print(table)


def display_eval(console: Console, final: Optional[dict[str, Any]], title: str = "Evaluation", use_ascii_box: bool = False) -> None:
    if not final:
        console.print("[yellow]no test set; evaluation skipped[/yellow]")
        return
    table = Table(
        title=Text(title, style="bold white"),
        box=box.ASCII if use_ascii_box else box.ROUNDED,
        expand=False,
    )
    table.add_column("Metric", overflow="fold")
    table.add_column("Value", justify="right")
    table.add_row("test accuracy %", _pct(final.get("test_accuracy")))
    table.add_row("verification accuracy %", _pct(final.get("verification_accuracy")))
    for fpr, tpr in final.get("tpr_at_fpr", {}).items():
        table.add_row(f"TPR % @ FPR={fpr}", _pct(tpr))
    table.add_row("rank-1 %", _pct(final.get("rank1")))
    console.print(table)


def display_estimate(console: Console, estimate: dict[str, Any]) -> None:
    table = Table(title=Text("Noise estimate", style="bold white"), expand=False)
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    table.add_row("noise rate %", f"{100.0 * estimate['rate']:.2f}")
    table.add_row("pair-level rate %", f"{100.0 * estimate['pair_rate']:.2f}")
    table.add_row("pairs", str(estimate["pair_count"]))
    table.add_row("degenerate fit", "yes" if estimate["degenerate"] else "no")
    gmm = estimate.get("gmm", {})
    for k in ("means", "variances", "weights"):
        if k in gmm:
            table.add_row(k, ", ".join(f"{v:.4f}" for v in gmm[k]))
    console.print(table)
