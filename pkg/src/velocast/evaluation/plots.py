"""Figure emission: AEE curves, critical-difference diagrams, forecast overlays.

All figures are written as PNG with fixed geometry so identical inputs give
byte-identical files.
"""
from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ..core.sample import Sample
from ..core.horizons import HorizonSet
from .stats import NemenyiResult

MODEL_COLORS = ("tab:green", "tab:red", "tab:orange", "tab:blue",
                "tab:purple", "tab:brown", "tab:pink", "tab:gray")


def _save(fig, out_path: str | Path) -> Path:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="png", dpi=110, metadata={"Software": None})
    plt.close(fig)
    return out


def plot_aee_curves(horizons: HorizonSet, curves: Mapping[str, np.ndarray],
                    out_path: str | Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for (name, curve), color in zip(curves.items(), MODEL_COLORS):
        ax.plot(horizons.seconds, curve, label=name, color=color)
    ax.set_xlabel("forecast horizon [s]")
    ax.set_ylabel("AEE [m]")
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _save(fig, out_path)


def plot_aee_grid(horizons: HorizonSet,
                  curves_by_bucket: Mapping[str, Mapping[str, np.ndarray]],
                  out_path: str | Path) -> Path:
    buckets = list(curves_by_bucket)
    cols = min(4, max(1, len(buckets)))
    rows = (len(buckets) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(4 * cols, 3 * rows), squeeze=False)
    for ax in axes.flat:
        ax.set_visible(False)
    for k, bucket in enumerate(buckets):
        ax = axes[k // cols][k % cols]
        ax.set_visible(True)
        for (name, curve), color in zip(curves_by_bucket[bucket].items(), MODEL_COLORS):
            ax.plot(horizons.seconds, curve, label=name, color=color)
        ax.set_title(bucket)
        ax.grid(alpha=0.3)
        if k == 0:
            ax.legend(fontsize=8)
    fig.supxlabel("forecast horizon [s]")
    fig.supylabel("AEE [m]")
    fig.tight_layout()
    return _save(fig, out_path)


def plot_cd_diagram(result: NemenyiResult, out_path: str | Path,
                    title: str = "") -> Path:
    """Mean ranks on a number line; bars connect groups of models whose
    differences are below the critical difference."""
    k = len(result.model_names)
    order = np.argsort(result.mean_ranks, kind="stable")
    fig, ax = plt.subplots(figsize=(6, 1.6 + 0.45 * k))
    lo = 1.0
    hi = float(k)
    ax.set_xlim(lo - 0.2, hi + 0.2)
    ax.set_ylim(-0.6 - 0.45 * (k + len(result.groups)), 1.6)
    ax.axis("off")
    ax.plot([lo, hi], [1.0, 1.0], color="black", lw=1)
    for r in range(1, k + 1):
        ax.plot([r, r], [1.0, 1.08], color="black", lw=1)
        ax.text(r, 1.18, str(r), ha="center", fontsize=9)
    for i, m in enumerate(order):
        y = -0.15 - 0.45 * i
        rank = result.mean_ranks[m]
        ax.plot([rank, rank], [1.0, y], color="gray", lw=0.8)
        ax.text(rank, y - 0.08, f"{result.model_names[m]} ({rank:.2f})",
                ha="center", va="top", fontsize=9)
    y = -0.3 - 0.45 * k
    for g, names in enumerate(result.groups):
        if len(names) < 2:
            continue
        ranks = [result.mean_ranks[result.model_names.index(n)] for n in names]
        ax.plot([min(ranks) - 0.05, max(ranks) + 0.05], [y, y], color="black", lw=3)
        y -= 0.3
    caption = f"CD = {result.critical_difference:.3f}"
    if title:
        caption = f"{title}   {caption}"
    ax.text(0.5 * (lo + hi), 1.45, caption, ha="center", fontsize=10)
    fig.tight_layout()
    return _save(fig, out_path)


def plot_forecast_examples(samples: Sequence[Sample],
                           forecasts_by_model: Mapping[str, np.ndarray],
                           indices: Sequence[int], out_path: str | Path) -> Path:
    """Ego-frame overlays: past input, ground truth, and model forecasts."""
    cols = len(indices)
    fig, axes = plt.subplots(1, max(cols, 1), figsize=(3.2 * max(cols, 1), 3.4),
                             squeeze=False)
    for a, idx in enumerate(indices):
        ax = axes[0][a]
        s = samples[idx]
        ax.plot(s.past.positions[:, 0], s.past.positions[:, 1],
                color="gray", lw=1.5, label="input")
        ax.plot(s.future_gt.positions[:, 0], s.future_gt.positions[:, 1],
                color="black", lw=1.5, label="ground truth")
        for (name, fc), color in zip(forecasts_by_model.items(), MODEL_COLORS[2:]):
            ax.plot(fc[idx][:, 0], fc[idx][:, 1], color=color, lw=1.2, label=name)
        ax.set_title(s.motion_state.value, fontsize=10)
        ax.set_aspect("equal")
        ax.grid(alpha=0.3)
        if a == 0:
            ax.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, out_path)
