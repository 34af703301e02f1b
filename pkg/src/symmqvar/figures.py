"""Figure rendering for experiment outputs.

Every CLI run that writes delimited results also renders the matching
matplotlib figures next to them (PNG). Rendering is headless and optional;
the CSV stays the primary artifact.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def training_curves(metric_rows: Sequence[dict], run_id: str, path) -> Path:
    """Accuracy and loss over epochs/steps for one run."""
    axis = "epoch" if "epoch" in metric_rows[0] else "step"
    xs = [row[axis] for row in metric_rows]
    fig, (ax_acc, ax_loss) = plt.subplots(1, 2, figsize=(9, 3.2))
    for key, style in (("train_acc", "-"), ("test_acc", "--")):
        ax_acc.plot(xs, [r[key] for r in metric_rows], style, label=key)
    ax_acc.set_xlabel(axis)
    ax_acc.set_ylabel("accuracy")
    ax_acc.set_ylim(0, 1)
    ax_acc.legend()
    for key, style in (("train_loss", "-"), ("test_loss", "--")):
        ax_loss.plot(xs, [r[key] for r in metric_rows], style, label=key)
    ax_loss.set_xlabel(axis)
    ax_loss.set_ylabel("loss")
    ax_loss.legend()
    fig.suptitle(run_id, fontsize=9)
    return _save(fig, path)


def accuracy_delta_violins(delta_rows: Sequence[dict], path) -> Path | None:
    """Violin plot of per-cell (invariant - free) mean-accuracy deltas."""
    train = [row["delta_mean_train_acc"] for row in delta_rows]
    test = [row["delta_mean_test_acc"] for row in delta_rows]
    if not train:
        return None
    fig, ax = plt.subplots(figsize=(4.5, 3.4))
    if len(train) > 1:
        ax.violinplot([train, test], showmeans=True)
    ax.scatter(np.ones(len(train)) + np.linspace(-0.05, 0.05, len(train)), train, s=12, color="k")
    ax.scatter(2 * np.ones(len(test)) + np.linspace(-0.05, 0.05, len(test)), test, s=12, color="k")
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_xticks([1, 2], ["train", "test"])
    ax.set_ylabel("accuracy delta (invariant - free)")
    return _save(fig, path)


def sweep_grid(agg_rows: Sequence[dict], metric: str, path) -> Path | None:
    """Mean final accuracy per (l, p) cell and variant."""
    cells = sorted({(r["l"], r["p"]) for r in agg_rows})
    if not cells:
        return None
    fig, ax = plt.subplots(figsize=(max(4.0, 0.8 * len(cells) + 2), 3.2))
    for variant, marker in (("invariant", "o"), ("free", "s")):
        means = []
        for cell in cells:
            vals = [
                r[metric]
                for r in agg_rows
                if (r["l"], r["p"]) == cell and r["variant"] == variant
            ]
            means.append(np.mean(vals) if vals else np.nan)
        ax.plot(range(len(cells)), means, marker=marker, label=variant)
    ax.set_xticks(range(len(cells)), [f"({l},{p})" for l, p in cells], rotation=45)
    ax.set_ylabel(metric)
    ax.set_ylim(0, 1)
    ax.legend()
    return _save(fig, path)


def vqe_energy_iterations(result_rows: Sequence[dict], path) -> Path:
    """Mean final energy (with the exact line) and iteration count vs p."""
    families = sorted({r["family"] for r in result_rows})
    ps = sorted({r["p"] for r in result_rows})
    fig, (ax_e, ax_i) = plt.subplots(2, 1, figsize=(5, 5.2), sharex=True)
    for family in families:
        means, iters = [], []
        for p in ps:
            rows = [r for r in result_rows if r["family"] == family and r["p"] == p]
            means.append(np.mean([r["final_energy"] for r in rows]) if rows else np.nan)
            iters.append(np.mean([r["iterations"] for r in rows]) if rows else np.nan)
        ax_e.plot(ps, means, marker="o", label=family)
        ax_i.plot(ps, iters, marker="o", label=family)
    exact = {r["exact_energy"] for r in result_rows}
    for e in exact:
        ax_e.axhline(e, color="gray", lw=0.8, ls=":")
    ax_e.set_ylabel("mean energy")
    ax_e.legend()
    ax_i.set_ylabel("mean iterations")
    ax_i.set_xlabel("layers p")
    return _save(fig, path)


def barren_plot(rows: Sequence[dict], path) -> Path:
    """Gradient variance against system size on a log scale."""
    families = sorted({r["family"] for r in rows})
    fig, ax = plt.subplots(figsize=(4.5, 3.4))
    for family in families:
        sub = sorted((r for r in rows if r["family"] == family), key=lambda r: r["N"])
        ns = [r["N"] for r in sub]
        vs = [r["variance"] for r in sub]
        es = [r["stderr"] for r in sub]
        ax.errorbar(ns, vs, yerr=es, marker="o", capsize=3, label=family)
    ax.set_yscale("log")
    ax.set_xlabel("qubits N")
    ax.set_ylabel("Var of the probed gradient")
    ax.legend()
    return _save(fig, path)


def dataset_histogram(labels: Sequence, path, title: str = "") -> Path:
    """Bar chart of class/difficulty counts."""
    counts = defaultdict(int)
    for label in labels:
        counts[label] += 1
    keys = sorted(counts, key=str)
    fig, ax = plt.subplots(figsize=(4.5, 3))
    ax.bar(range(len(keys)), [counts[k] for k in keys])
    ax.set_xticks(range(len(keys)), [str(k) for k in keys])
    ax.set_ylabel("count")
    if title:
        ax.set_title(title, fontsize=9)
    return _save(fig, path)
