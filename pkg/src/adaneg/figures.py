"""Figure rendering for run and experiment outputs. File-only: the Agg
backend is forced so this works headless."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .pipeline import SampleRecord

_ID_COLOR = "#2b6cb0"
_OOD_COLOR = "#c05621"


def plot_score_histogram(
    records: list[SampleRecord], path: str | Path, column: str = "s_all"
) -> Path:
    """Overlaid ID/OOD score histograms; rows without truth are skipped."""
    id_scores = [getattr(r, column) for r in records if isinstance(r.truth, int)]
    ood_scores = [getattr(r, column) for r in records if r.truth == "ood"]
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = np.linspace(0.0, 1.0, 61)
    if id_scores:
        ax.hist(id_scores, bins=bins, alpha=0.6, color=_ID_COLOR, label=f"id (n={len(id_scores)})")
    if ood_scores:
        ax.hist(ood_scores, bins=bins, alpha=0.6, color=_OOD_COLOR, label=f"ood (n={len(ood_scores)})")
    ax.set_xlabel(column)
    ax.set_ylabel("count")
    ax.set_title(f"{column} by ground truth")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_sweep(sweep: dict, path: str | Path) -> Path:
    rows = sweep["rows"]
    values = [r["value"] for r in rows]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    axes[0].plot(values, [r["auroc"] for r in rows], marker="o", color=_ID_COLOR)
    axes[0].set_ylabel("AUROC")
    axes[1].plot(values, [r["fpr95"] for r in rows], marker="o", color=_OOD_COLOR)
    axes[1].set_ylabel("FPR@95TPR")
    for ax in axes:
        ax.set_xlabel(sweep["param"])
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_mixture(mixture: dict, path: str | Path) -> Path:
    rows = mixture["rows"]
    ratios = [r["ratio"] for r in rows]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for label, color in (("base", _OOD_COLOR), ("adagap", _ID_COLOR)):
        axes[0].plot(ratios, [r[label]["auroc"] for r in rows], marker="o", color=color, label=label)
        axes[1].plot(ratios, [r[label]["fpr95"] for r in rows], marker="o", color=color, label=label)
    axes[0].set_ylabel("AUROC")
    axes[1].set_ylabel("FPR@95TPR")
    for ax in axes:
        ax.set_xlabel("id : ood ratio")
        ax.set_xscale("log")
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_ordering(ordering: dict, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(range(len(ordering["auroc"])), ordering["auroc"], marker="o", color=_ID_COLOR)
    ax.set_xlabel("shuffle")
    ax.set_ylabel("AUROC")
    ax.set_title(f"arrival-order spread = {ordering['auroc_spread']:.5f}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_isor(report: dict, path: str | Path) -> Path:
    """ISOR of learned vs text-only proxies, id rows and negative rows."""
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharey=True)
    bins = np.linspace(0.0, 1.0, 41)
    axes[0].hist(report["id_rows_text_only"], bins=bins, alpha=0.5, color="#718096", label="text only")
    axes[0].hist(report["id_rows"], bins=bins, alpha=0.6, color=_ID_COLOR, label="learned")
    axes[0].set_title("id rows")
    axes[1].hist(report["neg_rows_text_only"], bins=bins, alpha=0.5, color="#718096", label="text only")
    axes[1].hist(report["neg_rows"], bins=bins, alpha=0.6, color=_OOD_COLOR, label="learned")
    axes[1].set_title("negative rows")
    for ax in axes:
        ax.set_xlabel("in-distribution mass")
        ax.legend()
    axes[0].set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
