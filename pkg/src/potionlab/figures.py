"""Matplotlib renderings of the report charts.

Figures are rendered with the Agg backend straight to PNG files next to the
CSV output. Variable metadata is stripped so re-rendering identical inputs
yields identical bytes (for a fixed matplotlib version).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .categories import CATEGORIES, short_label
from .report import CategoryCounts, ProbHistogram

_DPI = 150
_PNG_META = {"Software": None}  # drop the version banner chunk


def render_figures(counts: CategoryCounts, hist: ProbHistogram,
                   out_dir: str | Path) -> list[Path]:
    """Write counts.png and histogram.png; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [
        _render_counts(counts, out / "counts.png"),
        _render_histogram(hist, out / "histogram.png"),
    ]


def _render_counts(counts: CategoryCounts, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    labels = [short_label(c) for c in CATEGORIES]
    bars = ax.bar(range(len(labels)), counts.counts, color="#4878a8")
    ax.bar_label(bars, fontsize=8)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("recipes")
    ax.set_title(f"Predicted categories ({counts.total} recipes)")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI, metadata=_PNG_META)
    plt.close(fig)
    return path


def _render_histogram(hist: ProbHistogram, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    edges = hist.bin_edges
    widths = [hi - lo for lo, hi in zip(edges, edges[1:])]
    ax.bar(edges[:-1], hist.bin_counts, width=widths, align="edge",
           color="#4878a8", edgecolor="white", linewidth=0.5)
    ax.set_xlim(0.0, 1.0)
    ax.set_xlabel("top predicted probability")
    ax.set_ylabel("recipes")
    ax.set_title("Top predicted probability per recipe")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI, metadata=_PNG_META)
    plt.close(fig)
    return path
