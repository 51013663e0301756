"""Batch classification and result reports.

emit_reports writes, into one directory:

* ``counts.csv``      predicted recipes per category, taxonomy order
* ``histogram.csv``   top-probability histogram, 20 bins over [0, 1]
* ``ambiguity.csv``   top-k categories per recipe with an ambiguity flag
* ``report.svg``      two static bar charts (categories, histogram)
* ``counts.png`` / ``histogram.png``   the same charts via matplotlib
* ``run_meta``        JSON with seeds, configs, corpus digest, tool version

All delimited and SVG output is byte-identical for identical inputs:
probabilities are written with 6 decimal digits (Python's round-half-even
float formatting), coordinates with fixed precision, and rows in input
order. CSV files are UTF-8 with LF line endings and a header row.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ._version import __version__
from .categories import CATEGORIES, NUM_CATEGORIES, short_label
from .corpus import Recipe
from .model import ModelParams, Prediction, predict

HISTOGRAM_BINS = 20

DEFAULT_TOP_K = 3
DEFAULT_AMBIGUITY_THRESHOLD = 0.10


@dataclass(frozen=True)
class CategoryCounts:
    counts: tuple[int, ...]
    total: int


@dataclass(frozen=True)
class ProbHistogram:
    bin_edges: tuple[float, ...]  # 21 edges, 0.00 .. 1.00
    bin_counts: tuple[int, ...]   # 20 bins, last right-inclusive


@dataclass(frozen=True)
class AmbiguityEntry:
    recipe_id: str
    top: tuple[tuple[str, float], ...]  # (category name, probability), descending
    ambiguous: bool


def classify_batch(model: ModelParams, recipes: list[Recipe],
                   threads: int = 1) -> list[Prediction]:
    """One Prediction per recipe, output order matching input order.

    The model is read-only, so recipes may be classified on several threads;
    results are collected back in input order either way.
    """
    if threads > 1 and len(recipes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda r: predict(model, r), recipes))
    return [predict(model, r) for r in recipes]


def tally(predictions: list[Prediction]) -> CategoryCounts:
    counts = [0] * NUM_CATEGORIES
    for p in predictions:
        counts[p.top_index] += 1
    return CategoryCounts(counts=tuple(counts), total=len(predictions))


def histogram(predictions: list[Prediction], bins: int = HISTOGRAM_BINS) -> ProbHistogram:
    """Bin top probabilities into equal bins over [0, 1].

    Bins are left-inclusive; only the last bin includes its right edge.
    """
    edges = np.arange(bins + 1) / bins
    counts = [0] * bins
    if predictions:
        tops = np.array([p.top_prob for p in predictions])
        idx = np.minimum(np.searchsorted(edges, tops, side="right") - 1, bins - 1)
        for i in idx:
            counts[i] += 1
    return ProbHistogram(bin_edges=tuple(float(e) for e in edges),
                         bin_counts=tuple(counts))


def ambiguity_report(predictions: list[Prediction], recipes: list[Recipe],
                     k: int = DEFAULT_TOP_K,
                     threshold: float = DEFAULT_AMBIGUITY_THRESHOLD) -> list[AmbiguityEntry]:
    """Top-k category listing per recipe; flags recipes whose second-highest
    probability reaches the threshold."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    entries = []
    for recipe, pred in zip(recipes, predictions):
        order = np.argsort(-pred.probs, kind="stable")  # ties: lowest id first
        top = tuple((CATEGORIES[int(c)].name, float(pred.probs[c])) for c in order[:k])
        ambiguous = float(pred.probs[order[1]]) >= threshold
        entries.append(AmbiguityEntry(recipe_id=recipe.id, top=top, ambiguous=ambiguous))
    return entries


def emit_reports(counts: CategoryCounts, hist: ProbHistogram,
                 ambiguity: list[AmbiguityEntry], out_dir: str | Path,
                 run_info: dict[str, Any] | None = None,
                 render_png: bool = True) -> list[Path]:
    """Write all report files; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "counts.csv"
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["category", "count"])
        for cat, n in zip(CATEGORIES, counts.counts):
            w.writerow([cat.name, n])
    written.append(path)

    path = out / "histogram.csv"
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, n in zip(hist.bin_edges, hist.bin_edges[1:], hist.bin_counts):
            w.writerow([f"{lo:.2f}", f"{hi:.2f}", n])
    written.append(path)

    path = out / "ambiguity.csv"
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "rank", "category", "probability", "ambiguous"])
        for entry in ambiguity:
            for rank, (name, prob) in enumerate(entry.top, start=1):
                w.writerow([entry.recipe_id, rank, name, f"{prob:.6f}",
                            "true" if entry.ambiguous else "false"])
    written.append(path)

    path = out / "report.svg"
    path.write_text(render_svg(counts, hist), encoding="utf-8", newline="\n")
    written.append(path)

    if render_png:
        from .figures import render_figures

        written.extend(render_figures(counts, hist, out))

    path = out / "run_meta"
    meta = {
        "tool": "potionlab",
        "tool_version": __version__,
        "total_recipes": counts.total,
        "ambiguous_recipes": sum(1 for e in ambiguity if e.ambiguous),
    }
    if run_info:
        meta.update(run_info)
    path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8", newline="\n")
    written.append(path)
    return written


# --- static SVG rendering ----------------------------------------------------

_SVG_W = 900.0
_PANEL_H = 330.0
_MARGIN_L = 60.0
_MARGIN_R = 20.0
_BASE_PAD = 60.0
_TOP_PAD = 40.0


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _bar_panel(lines: list[str], y0: float, title: str, labels: list[str],
               values: list[int], bar_gap_frac: float = 0.25) -> None:
    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    base = y0 + _PANEL_H - _BASE_PAD
    top = y0 + _TOP_PAD
    vmax = max(max(values), 1)
    slot = plot_w / len(values)
    bar_w = slot * (1.0 - bar_gap_frac)

    lines.append(f'<text x="{_fmt(_SVG_W / 2)}" y="{_fmt(y0 + 22)}" '
                 f'text-anchor="middle" font-size="15" font-weight="bold">{title}</text>')
    lines.append(f'<line x1="{_fmt(_MARGIN_L)}" y1="{_fmt(base)}" '
                 f'x2="{_fmt(_SVG_W - _MARGIN_R)}" y2="{_fmt(base)}" stroke="black"/>')
    lines.append(f'<text x="{_fmt(_MARGIN_L - 8)}" y="{_fmt(top + 4)}" '
                 f'text-anchor="end" font-size="11">{vmax}</text>')
    lines.append(f'<text x="{_fmt(_MARGIN_L - 8)}" y="{_fmt(base + 4)}" '
                 f'text-anchor="end" font-size="11">0</text>')
    for i, (label, value) in enumerate(zip(labels, values)):
        x = _MARGIN_L + i * slot + (slot - bar_w) / 2
        h = (base - top) * value / vmax
        lines.append(f'<rect x="{_fmt(x)}" y="{_fmt(base - h)}" '
                     f'width="{_fmt(bar_w)}" height="{_fmt(h)}" fill="#4878a8"/>')
        if value:
            lines.append(f'<text x="{_fmt(x + bar_w / 2)}" y="{_fmt(base - h - 4)}" '
                         f'text-anchor="middle" font-size="10">{value}</text>')
        lines.append(f'<text x="{_fmt(x + bar_w / 2)}" y="{_fmt(base + 16)}" '
                     f'text-anchor="middle" font-size="10">{label}</text>')


def render_svg(counts: CategoryCounts, hist: ProbHistogram) -> str:
    """Two stacked bar charts as a standalone deterministic SVG 1.1 document."""
    height = 2 * _PANEL_H
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(_SVG_W)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(_SVG_W)} {_fmt(height)}" '
        f'font-family="Helvetica, Arial, sans-serif">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    _bar_panel(lines, 0.0,
               f"Predicted categories ({counts.total} recipes)",
               [short_label(c) for c in CATEGORIES], list(counts.counts))
    _bar_panel(lines, _PANEL_H,
               "Top predicted probability per recipe",
               [_fmt(lo) for lo in hist.bin_edges[:-1]], list(hist.bin_counts),
               bar_gap_frac=0.1)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
