"""Matplotlib figures rendered to files alongside the delimited reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .classify import ClassStats
from .schema.stats import SpanReport


def render_bipartite(report: SpanReport, out_path, min_span: int = 2) -> Path:
    """Category-module bipartite adjacency: categories on the top rail,
    multi-category modules on the bottom."""
    out_path = Path(out_path)
    modules = report.spanning_at_least(min_span)
    categories = sorted({c for m in modules for c in report.module_categories[m]})
    fig, ax = plt.subplots(figsize=(max(8, len(modules) * 0.9), 4.5))
    cat_x = {c: i for i, c in enumerate(categories)}
    mod_x = {m: i * (len(categories) - 1) / max(1, len(modules) - 1) for i, m in enumerate(modules)}
    for m in modules:
        for c in report.module_categories[m]:
            ax.plot([cat_x[c], mod_x[m]], [1, 0], color="#888", lw=0.7, zorder=1)
    ax.scatter([cat_x[c] for c in categories], [1] * len(categories), s=220, zorder=2)
    ax.scatter([mod_x[m] for m in modules], [0] * len(modules), s=160, zorder=2, color="#c44")
    for c, x in cat_x.items():
        ax.annotate(c, (x, 1.06), ha="center", fontsize=8)
    for m, x in mod_x.items():
        ax.annotate(f"{m} ({report.span(m)})", (x, -0.12), ha="center", fontsize=7, rotation=30)
    ax.set_ylim(-0.35, 1.25)
    ax.axis("off")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_coverage(stats: ClassStats, out_path) -> Path:
    out_path = Path(out_path)
    cats = sorted(stats.per_category)
    counts = [stats.per_category[c] for c in cats]
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    left.bar(cats, counts)
    left.set_title("entities per category")
    left.tick_params(axis="x", rotation=45, labelsize=8)
    right.bar(["r_c", "r_m"], [stats.r_c, stats.r_m])
    right.set_ylim(0, 1.0)
    right.set_title("coverage rates")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
