"""Matplotlib renderings of energy curves and profiles (file output only)."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .profiles import SolitaryWave  # noqa: E402


def plot_curves(path, curves: Mapping[str, tuple[np.ndarray, np.ndarray]], ylabel: str = "E",
                title: str | None = None) -> Path:
    """Line chart of ``y(omega)`` for each labelled curve; format from the suffix."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for label, (x, y) in curves.items():
        ax.plot(x, y, marker="o", markersize=3, label=label)
    ax.set_xlabel(r"$\omega$")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_profile(path, wave: SolitaryWave, r_max: float | None = None) -> Path:
    """``v``, ``u`` and ``h`` against ``r``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    r = wave.grid.nodes
    keep = r <= (r_max if r_max is not None else r[-1])
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.plot(r[keep], wave.spinor.v[keep], label="v")
    ax.plot(r[keep], wave.spinor.u[keep], label="u")
    ax.plot(r[keep], wave.scalar.values[keep], label="h", linestyle="--")
    ax.set_xlabel("r")
    p = wave.params
    ax.set_title(f"n={p.n}, omega={p.omega:g}, M={p.M:g}, g={p.g:.6g}")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
