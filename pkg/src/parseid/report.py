"""Figure rendering for evaluation reports and record inspection.

All figures go to files through the Agg backend, so this works headless;
nothing here opens a window.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .classes import MergedClass
from .color import decode_lab, lab_to_rgb
from .evaluation import QueryRow
from .features import FeatureRecord
from .texture import lbp_bins_to_dense36

# Readability cap for the CMC x axis; past this the curve is flat anyway.
MAX_CMC_RANK = 100


def _text_only(message: str, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 2))
    ax.text(0.5, 0.5, message, ha="center", va="center")
    ax.set_axis_off()
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def save_cmc_figure(rows: list[QueryRow], path: str | Path) -> Path:
    """Cumulative match curve over the counted queries of one evaluation."""
    path = Path(path)
    ranks = np.array(
        sorted(r.best_match_rank for r in rows if r.best_match_rank is not None)
    )
    if ranks.size == 0:
        return _text_only("no queries with a reachable true match", path)
    top = int(min(max(ranks.max(), 10), MAX_CMC_RANK))
    xs = np.arange(1, top + 1)
    ys = 100.0 * np.searchsorted(ranks, xs, side="right") / ranks.size
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(xs, ys, where="post")
    ax.plot(1, ys[0], "o")
    ax.annotate(f"rank-1: {ys[0]:.1f}%", (1, ys[0]), xytext=(6, -12), textcoords="offset points")
    ax.set_xlabel("rank")
    ax.set_ylabel("queries matched (%)")
    ax.set_title("Cumulative match curve")
    ax.set_xlim(1, top)
    ax.set_ylim(0, 105)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def save_ap_histogram(rows: list[QueryRow], path: str | Path) -> Path:
    """Distribution of per-query average precision, with the mean marked."""
    path = Path(path)
    aps = np.array([100.0 * r.ap for r in rows if r.ap is not None])
    if aps.size == 0:
        return _text_only("no queries with a reachable true match", path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(aps, bins=np.linspace(0, 100, 21), edgecolor="black", linewidth=0.5)
    mean = float(aps.mean())
    ax.axvline(mean, linestyle="--", color="tab:red")
    ax.text(mean, ax.get_ylim()[1] * 0.95, f" mAP {mean:.1f}%", color="tab:red", va="top")
    ax.set_xlabel("average precision (%)")
    ax.set_ylabel("queries")
    ax.set_title("Per-query average precision")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _mean_rgb(features) -> np.ndarray:
    native = decode_lab(features.mean.as_array())
    return lab_to_rgb(native.reshape(1, 1, 3)) / 255.0


def save_feature_figure(record: FeatureRecord, path: str | Path) -> Path:
    """One row per class: mean color swatch, the three binarized Lab
    histograms as bit strips, and the inner/contour LBP distributions."""
    path = Path(path)
    class_ids = sorted(record.classes)
    if not class_ids:
        return _text_only(f"{record.image_id}: no classes", path)
    n = len(class_ids)
    fig, axes = plt.subplots(
        n, 3, figsize=(10, 0.9 * n + 1.2), squeeze=False,
        gridspec_kw={"width_ratios": [1, 5, 4]},
    )
    for row, class_id in enumerate(class_ids):
        feats = record.classes[class_id]
        swatch, bits_ax, lbp_ax = axes[row]

        swatch.imshow(_mean_rgb(feats))
        label = MergedClass(class_id).key
        if feats.over_highlighted:
            label += "\n(over-highlighted)"
        swatch.set_ylabel(label, rotation=0, ha="right", va="center", fontsize=8)

        bits = np.stack(
            [feats.hist_l.bits, feats.hist_a.bits, feats.hist_b.bits]
        ).astype(float)
        bits_ax.imshow(bits, aspect="auto", cmap="Greys", vmin=0, vmax=1)
        bits_ax.set_yticks([0, 1, 2], ["L", "a", "b"], fontsize=7)

        dense = np.stack(
            [
                lbp_bins_to_dense36(feats.lbp_inner.bins),
                lbp_bins_to_dense36(feats.lbp_contour.bins),
            ]
        )
        lbp_ax.imshow(dense, aspect="auto", cmap="viridis")
        lbp_ax.set_yticks([0, 1], ["inner", "contour"], fontsize=7)

        for ax in (swatch, bits_ax, lbp_ax):
            ax.set_xticks([])
        swatch.set_yticks([])
        if row == 0:
            swatch.set_title("mean color", fontsize=8)
            bits_ax.set_title("binarized Lab histograms (64 bins)", fontsize=8)
            lbp_ax.set_title("LBP codes (36 canonical)", fontsize=8)
    fig.suptitle(record.image_id, fontsize=10)
    fig.tight_layout(rect=(0, 0, 1, 0.97))
    fig.savefig(path)
    plt.close(fig)
    return path
