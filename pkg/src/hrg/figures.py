"""Matplotlib figure rendering for CLI reports.

Every plot is written straight to a file (Agg backend); the same data also
goes out as plain two-column .dat files, so the figures are a convenience
layer, not the canonical record.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_degree_distribution",
    "save_radius_degree",
    "save_measure_validation",
    "save_comparison",
]


def save_degree_distribution(hist_counts: dict[int, int], n: int, path,
                             predicted: dict[int, float] | None = None,
                             title: str = "degree distribution"):
    """Log-log scatter of degree counts, optionally with the predicted curve."""
    ks = np.array(sorted(k for k in hist_counts if k >= 1))
    fig, ax = plt.subplots(figsize=(5.5, 4))
    if ks.size:
        counts = np.array([hist_counts[int(k)] for k in ks], dtype=float)
        ax.loglog(ks, counts, "o", ms=3.5, alpha=0.7, label="observed")
    if predicted:
        pk = np.array(sorted(k for k in predicted if k >= 1))
        if pk.size:
            ax.loglog(pk, n * np.array([predicted[int(k)] for k in pk]),
                      "-", color="crimson", lw=1.2, label="predicted")
    ax.set_xlabel("degree k")
    ax.set_ylabel("vertices of degree k")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_radius_degree(centers, means, counts, path,
                       predicted=None, min_count: int = 10,
                       title: str = "mean degree vs radius"):
    """Semi-log plot of binned mean degree against radius."""
    centers = np.asarray(centers, dtype=float)
    means = np.asarray(means, dtype=float)
    ok = np.asarray(counts) >= min_count
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.semilogy(centers[ok], means[ok], "o", ms=3.5, alpha=0.7, label="observed")
    if predicted is not None:
        ax.semilogy(centers, np.asarray(predicted, dtype=float),
                    "-", color="crimson", lw=1.2, label="predicted")
    ax.set_xlabel("radius r")
    ax.set_ylabel("mean degree")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_measure_validation(labels, z_scores, path, threshold: float = 3.0):
    """Bar chart of Monte Carlo z-scores against the acceptance threshold."""
    z = np.asarray(z_scores, dtype=float)
    fig, ax = plt.subplots(figsize=(max(5.5, 0.3 * len(labels)), 4))
    colors = np.where(np.abs(z) <= threshold, "steelblue", "crimson")
    ax.bar(np.arange(z.size), z, color=colors)
    ax.axhline(threshold, color="gray", ls="--", lw=0.8)
    ax.axhline(-threshold, color="gray", ls="--", lw=0.8)
    ax.set_xticks(np.arange(z.size))
    ax.set_xticklabels(labels, rotation=90, fontsize=6)
    ax.set_ylabel("z-score (MC vs closed form)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_comparison(table, path):
    """Observed/predicted ratios per campaign quantity with tolerance bands."""
    rows = [r for r in table.rows if r.predicted not in (None, 0.0)]
    fig, ax = plt.subplots(figsize=(6, 0.45 * max(len(rows), 4) + 1.2))
    for i, r in enumerate(rows):
        ratio = r.mean / r.predicted
        lo = r.min / r.predicted
        hi = r.max / r.predicted
        color = {"pass": "steelblue", "fail": "crimson"}.get(r.status, "gray")
        ax.plot([lo, hi], [i, i], "-", color=color, lw=1.5, alpha=0.6)
        ax.plot(ratio, i, "o", color=color)
        if r.tolerance is not None and r.status in ("pass", "fail"):
            ax.plot([1 - r.tolerance, 1 + r.tolerance], [i - 0.18, i - 0.18],
                    "|-", color="gray", lw=0.8, ms=4)
    ax.axvline(1.0, color="black", lw=0.8)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels([r.quantity for r in rows], fontsize=8)
    ax.set_xlabel("observed / predicted")
    ax.set_title(f"alpha={table.alpha:g} C={table.C:g} n={table.n}", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
