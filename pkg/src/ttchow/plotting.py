"""Figures for CLI reports.

Uses the object-oriented Figure API with the Agg canvas directly, so no
global pyplot state is touched and batch items can render concurrently.
"""

from __future__ import annotations

import math
import os
from typing import Sequence

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
from matplotlib.ticker import MaxNLocator

from .abgroup import GroupExpr

RC = {"dpi": 120}
COLORS = {"free": "#4c72b0", "torsion": "#dd8452", "symbol": "#8c8c8c"}


def _new(width: float = 6.0, height: float = 3.5) -> tuple[Figure, object]:
    fig = Figure(figsize=(width, height), dpi=RC["dpi"])
    FigureCanvasAgg(fig)
    return fig, fig.add_subplot(1, 1, 1)


def _save(fig: Figure, path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    return path


def summand_counts(g: GroupExpr) -> tuple[int, int, int]:
    """(free rank, number of cyclic torsion factors, number of symbols)."""
    return g.free_rank, len(g.torsion), len(g.symbols)


def plot_group(g: GroupExpr, path: str, title: str = "") -> str:
    """One bar per summand: free rank, each cyclic factor by log2 order, symbols."""
    fig, ax = _new()
    labels, heights, colors = [], [], []
    if g.free_rank:
        labels.append(f"Z^{g.free_rank}")
        heights.append(g.free_rank)
        colors.append(COLORS["free"])
    for d in g.torsion:
        labels.append(f"Z/{d}")
        heights.append(math.log2(d))
        colors.append(COLORS["torsion"])
    for s in g.symbols:
        labels.append(str(s))
        heights.append(1)
        colors.append(COLORS["symbol"])
    if not labels:
        labels, heights, colors = ["0"], [0], [COLORS["free"]]
    ax.bar(range(len(labels)), heights, color=colors)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("rank / log2 order")
    ax.set_title(title or str(g), fontsize=9)
    return _save(fig, path)


def plot_batch(names: Sequence[str], groups: Sequence[GroupExpr | None], path: str) -> str:
    """Stacked summand counts per batch item; failed items are left empty."""
    fig, ax = _new(max(6.0, 0.5 * len(names) + 2), 3.5)
    x = list(range(len(names)))
    counts = [summand_counts(g) if g is not None else (0, 0, 0) for g in groups]
    bottom = [0] * len(names)
    for k, key in enumerate(("free", "torsion", "symbol")):
        vals = [c[k] for c in counts]
        ax.bar(x, vals, bottom=bottom, color=COLORS[key], label=key)
        bottom = [b + v for b, v in zip(bottom, vals)]
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("summands")
    ax.yaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_ylim(0, max(bottom, default=0) + 1)
    if names:
        ax.legend(fontsize=7, frameon=False)
    return _save(fig, path)


def plot_forms(forms: Sequence[tuple[int, int, int]], disc: int, path: str) -> str:
    """Roots tau = (-b + sqrt(D)) / 2a of reduced forms in the upper half plane."""
    fig, ax = _new(4.5, 4.0)
    xs = [-b / (2 * a) for a, b, _ in forms]
    ys = [math.sqrt(-disc) / (2 * a) for a, _, _ in forms]
    # boundary of the standard fundamental domain
    ts = [i / 100 for i in range(-50, 51)]
    ax.plot(ts, [math.sqrt(1 - t * t) for t in ts], color="k", lw=0.8)
    top = max(ys + [1.2]) * 1.1
    for edge in (-0.5, 0.5):
        ax.plot([edge, edge], [math.sqrt(0.75), top], color="k", lw=0.8)
    ax.scatter(xs, ys, color=COLORS["torsion"], zorder=3, s=18)
    ax.set_xlim(-0.75, 0.75)
    ax.set_ylim(0, top)
    ax.set_xlabel("Re tau")
    ax.set_ylabel("Im tau")
    ax.set_title(f"reduced forms, D = {disc}, h = {len(forms)}", fontsize=9)
    return _save(fig, path)
