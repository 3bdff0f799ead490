"""PNG rendering for the report commands.

Figures are built with ``matplotlib.figure.Figure`` directly, so nothing
touches pyplot's global state and no display is required.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from matplotlib.figure import Figure

from .trace import Trace


def _save(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=120)
    return path


def plot_fig5(traces: Mapping[str, Trace], labels: Mapping[str, str], path: str | Path) -> Path:
    """One panel per trace; ``labels`` holds the robustness caption of each."""
    fig = Figure(figsize=(9, 6), constrained_layout=True)
    axes = fig.subplots(2, 2, sharex=True)
    for ax, (name, tr) in zip(axes.flat, traces.items()):
        ax.plot(tr.times, tr.signal("x"), color="tab:blue", lw=1.2)
        ax.axhline(0.0, color="0.5", lw=0.8, ls="--")
        ax.set_title(f"({name}) {labels.get(name, '')}", fontsize=9)
        ax.set_ylabel("x")
    for ax in axes[-1]:
        ax.set_xlabel("time")
    return _save(fig, path)


def plot_isobars(
    values: np.ndarray, grids: Mapping[str, np.ndarray], path: str | Path, levels: int = 21
) -> Path:
    """Side-by-side contour maps, one per semantics, on a shared colour scale."""
    fig = Figure(figsize=(5 * len(grids), 4.4), constrained_layout=True)
    axes = np.atleast_1d(fig.subplots(1, len(grids)))
    finite = np.concatenate([g[np.isfinite(g)].ravel() for g in grids.values()])
    lim = float(np.max(np.abs(finite))) if finite.size else 1.0
    bounds = np.linspace(-lim, lim, levels)
    cs = None
    for ax, (name, grid) in zip(axes, grids.items()):
        cs = ax.contourf(values, values, grid, levels=bounds, cmap="RdBu")
        ax.contour(values, values, grid, levels=bounds, colors="k", linewidths=0.3)
        ax.set_title(name)
        ax.set_xlabel("x (signed)")
        ax.set_ylabel("y (signed)")
        ax.set_aspect("equal")
    fig.colorbar(cs, ax=list(axes), label="signed robustness")
    return _save(fig, path)


def plot_convergence(histories: Sequence[Sequence[float]], path: str | Path, title: str = "") -> Path:
    """Best signed robustness against iteration, one line per run."""
    fig = Figure(figsize=(7, 4.5), constrained_layout=True)
    ax = fig.subplots()
    for h in histories:
        h = np.asarray(h, dtype=float)
        if h.size:
            ax.step(np.arange(1, h.size + 1), np.where(np.isfinite(h), h, np.nan), where="post", lw=0.9)
    ax.axhline(0.0, color="0.3", lw=0.8, ls="--")
    ax.set_xlabel("iteration")
    ax.set_ylabel("best signed robustness")
    if title:
        ax.set_title(title)
    return _save(fig, path)
