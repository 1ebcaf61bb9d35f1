"""Figure rendering for schedules and benchmark reports (file output only)."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .model import Instance, Schedule, makespan  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _pack(inst: Instance, x: Schedule, members: Sequence[int]) -> dict[int, float]:
    """First-fit vertical offsets on resource 0 so bars of concurrent tasks do not overlap."""
    placed: list[tuple[float, float, float, float]] = []  # start, end, lo, hi
    offset = {}
    for v in sorted(members, key=lambda u: (x.start[u], u)):
        s, e = x.start[v], x.end(inst, v)
        h = inst.task[v].demand[0] if inst.task[v].demand else 1.0
        lo = 0.0
        while True:
            clash = [p for p in placed if p[0] < e and s < p[1] and p[2] < lo + h and lo < p[3]]
            if not clash:
                break
            lo = max(p[3] for p in clash)
        placed.append((s, e, lo, lo + h))
        offset[v] = lo
    return offset


def plot_schedule(inst: Instance, x: Schedule, path: str | Path, title: str | None = None) -> Path:
    """Resource-time chart: one panel per pool, bar height = first-resource demand."""
    path = Path(path)
    pools = list(inst.pool_ids)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(len(pools), 1, figsize=(6.4, 1.6 + 1.4 * len(pools)),
                                 sharex=True, squeeze=False)
        cmap = plt.get_cmap("tab20")
        for ax, c in zip(axes[:, 0], pools):
            members = [v for v in inst.task_ids if x.pool[v] == c]
            off = _pack(inst, x, members)
            for v in members:
                s, e = x.start[v], x.end(inst, v)
                h = inst.task[v].demand[0] if inst.task[v].demand else 1.0
                ax.broken_barh([(s, e - s)], (off[v], h), facecolors=cmap(v % 20),
                               edgecolor="black", linewidth=0.5)
                ax.text(s + (e - s) / 2, off[v] + h / 2, str(v), ha="center", va="center", fontsize=7)
            cap = inst.pool[c].capacity[0]
            ax.axhline(cap, color="grey", linestyle="--", linewidth=0.8)
            ax.set_ylabel(f"pool {c}")
            ax.set_ylim(0, cap * 1.1)
        axes[-1, 0].set_xlabel("time")
        axes[0, 0].set_title(title or f"makespan {makespan(inst, x):.6g}")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return path


def plot_bench(summary: Mapping[str, float], path: str | Path, ylabel: str = "mean makespan") -> Path:
    """Bar chart of one number per method."""
    path = Path(path)
    names = list(summary)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(names) + 1.5), 3.0))
        ax.bar(range(len(names)), [summary[k] for k in names], color="tab:blue")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=45, ha="right")
        ax.set_ylabel(ylabel)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return path
