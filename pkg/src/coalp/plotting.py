"""Speedup figure for benchmark tables."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import BenchReport  # noqa: E402


def plot_speedup(rows: list[BenchReport], path, title: str = "") -> None:
    """Bar chart of speedup per configuration, with the 1.0 baseline marked."""
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(rows) + 2), 3.2))
    labels = [r.config for r in rows]
    bars = ax.bar(labels, [r.speedup for r in rows], color="#4c72b0", zorder=2)
    ax.bar_label(bars, fmt="%.2f", fontsize=8, padding=2)
    ax.axhline(1.0, color="black", linewidth=0.8, linestyle="--", zorder=3)
    ax.grid(axis="y", alpha=0.3, zorder=0)
    ax.spines[["top", "right"]].set_visible(False)
    ax.margins(y=0.15)
    ax.set_ylabel("speedup vs 1 thread")
    ax.set_xlabel("configuration")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
