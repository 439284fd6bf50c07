"""Figures written next to the CLI's delimited output."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .statevector import Indicator, StateVector  # noqa: E402

RC = {
    "axes.grid": True,
    "figure.autolayout": True,
    "font.size": 10.0,
    "legend.fontsize": "small",
    "savefig.dpi": 150,
}


def plot_amplitudes(state: StateVector, path: str | Path, title: str = "", marked: Indicator | None = None) -> Path:
    """Complex-plane scatter of the amplitudes beside a per-index bar chart."""
    path = Path(path)
    amps = state.amplitudes
    mask = marked.mask() if marked is not None else np.zeros(state.size, dtype=bool)
    with plt.rc_context(RC):
        fig, (ax_c, ax_b) = plt.subplots(1, 2, figsize=(9.0, 3.8))
        ax_c.scatter(amps.real[~mask], amps.imag[~mask], s=18, color="0.4", label="unmarked")
        if mask.any():
            ax_c.scatter(amps.real[mask], amps.imag[mask], s=18, color="C3", label="marked")
            ax_c.legend(loc="best")
        ax_c.axhline(0.0, color="k", lw=0.6)
        ax_c.axvline(0.0, color="k", lw=0.6)
        ax_c.set_xlabel("Re")
        ax_c.set_ylabel("Im")
        ax_c.set_aspect("equal", adjustable="datalim")

        xs = np.arange(state.size)
        ax_b.bar(xs, amps.real, width=0.8, color="C0", label="Re")
        ax_b.bar(xs, amps.imag, width=0.4, color="C1", label="Im")
        ax_b.set_xlabel("basis index")
        ax_b.set_ylabel("amplitude")
        ax_b.legend(loc="best")
        if title:
            fig.suptitle(title)
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_frequencies(table: list[list[int]], path: str | Path, title: str = "") -> Path:
    path = Path(path)
    values = [v for v, _ in table]
    counts = np.array([c for _, c in table], dtype=float)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(7.0, 3.5))
        ax.bar(range(len(values)), counts, color="C0")
        if counts.size:
            ax.axhline(counts.sum() / counts.size, color="C3", lw=1.0, ls="--", label="uniform")
            ax.legend(loc="best")
        ax.set_xticks(range(len(values)))
        ax.set_xticklabels([str(v) for v in values], rotation=90, fontsize=7)
        ax.set_xlabel("sampled value")
        ax.set_ylabel("count")
        if title:
            ax.set_title(title)
        fig.savefig(path)
        plt.close(fig)
    return path
