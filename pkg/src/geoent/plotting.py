"""Figure output for sweeps (headless, Agg backend).

The sweep CSV stays the primary artifact; these PNGs sit next to it.
"""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

_EXTENT = (0.0, math.pi / 2, 0.0, math.pi / 2)


def _axes(ax, title: str):
    ax.set_xlabel("v")
    ax.set_ylabel("u")
    ax.set_title(title)


def plot_domains(dmap, path, traces: dict | None = None) -> Path:
    """Categorical map of winning branches, with optional boundary traces overlaid."""
    names = sorted(set(dmap.labels.ravel().tolist()))
    codes = np.vectorize(names.index)(dmap.labels).astype(float)
    cmap = ListedColormap(plt.get_cmap("tab10").colors[: max(len(names), 1)])
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    im = ax.imshow(codes, origin="lower", extent=_EXTENT, cmap=cmap,
                   vmin=-0.5, vmax=len(names) - 0.5, interpolation="nearest")
    bar = fig.colorbar(im, ax=ax, ticks=range(len(names)))
    bar.ax.set_yticklabels(names)
    for name, pts in (traces or {}).items():
        if pts:
            u, v = zip(*pts)
            ax.plot(v, u, ".", ms=1.5, color="k", label=name)
    _axes(ax, f"domains: {dmap.domain_count}  (gamma = {dmap.gamma:.6g})")
    return _save(fig, path)


def plot_pmax(dmap, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    im = ax.imshow(dmap.p_max, origin="lower", extent=_EXTENT, cmap="viridis",
                   interpolation="nearest")
    fig.colorbar(im, ax=ax, label="P_max")
    _axes(ax, f"P_max  (gamma = {dmap.gamma:.6g})")
    return _save(fig, path)


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def figure_paths(csv_path) -> tuple[Path, Path]:
    """Default PNG names beside a CSV: ``<stem>_domains.png`` and ``<stem>_pmax.png``."""
    p = Path(csv_path)
    return p.with_name(p.stem + "_domains.png"), p.with_name(p.stem + "_pmax.png")
