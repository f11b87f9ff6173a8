"""Render emitted figure CSVs to PNG files (headless backend)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_figure"]


def _load_csv(path):
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.genfromtxt(lines[1:], delimiter=",", dtype=None, encoding=None, names=header)
    return header, np.atleast_1d(data)


def render_figure(manifest: dict, out_dir: str) -> str:
    """One PNG per figure, plotting each curve file's x/y columns."""
    fig_id = manifest["figure"]
    x_col = manifest["x"]
    y_col = manifest["y"]
    fig, ax = plt.subplots(figsize=(7.2, 5.0))
    for entry in manifest["files"]:
        header, data = _load_csv(os.path.join(out_dir, entry["file"]))
        if y_col not in header:
            continue
        style = "--" if entry["label"].startswith("cap_") else "-"
        ax.plot(data[x_col], data[y_col], style, linewidth=1.4, label=entry["label"])
    ax.set_xlabel("optical SNR (dB)")
    ax.set_ylabel(y_col.replace("_", " "))
    ax.set_title(manifest.get("title", f"figure {fig_id}"))
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = os.path.join(out_dir, f"fig{fig_id}.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
