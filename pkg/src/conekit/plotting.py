"""Figures for the CLI report path.

Built on :class:`matplotlib.figure.Figure` directly so no pyplot state or
interactive backend is involved.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

FIGSIZE = (6.4, 4.0)


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    return path


def plot_residuals(residuals, path, tol: float | None = None, title: str = "Picard residuals") -> Path:
    """Semilog plot of ``d_p(x_n, x_{n+1})`` against ``n``."""
    r = np.asarray(residuals, dtype=float)
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    n = np.arange(1, len(r) + 1)
    pos = r > 0
    ax.semilogy(n[pos], r[pos], marker=".", lw=1)
    if tol is not None:
        ax.axhline(tol, color="0.4", ls="--", lw=0.8, label=f"tol = {tol:g}")
        ax.legend()
    ax.set_xlabel("iteration n")
    ax.set_ylabel(r"$d_p(x_n, x_{n+1})$")
    ax.set_title(title)
    return _save(fig, path)


def plot_transfer(psi, path, t_max: float, pairs=None) -> Path:
    """``psi`` against the identity, optionally with observed
    ``(d_p(x, y), d_p(fx, fy))`` pairs scattered on top."""
    t = np.linspace(0.0, t_max, 400)
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    ax.plot(t, t, color="0.6", ls=":", label="t")
    ax.plot(t, np.asarray(psi(t)), label=r"$\psi(t)$")
    if pairs is not None:
        d, fd = pairs
        ax.scatter(d, fd, s=6, alpha=0.5, color="C3", label=r"$(d_p(x,y),\ d_p(fx,fy))$")
    ax.set_xlabel("t")
    ax.legend()
    ax.set_title("transferred comparison function")
    return _save(fig, path)


def plot_distance_table(labels, D, path, title: str = "induced metric") -> Path:
    D = np.asarray(D, dtype=float)
    fig = Figure(figsize=(4.8, 4.2))
    ax = fig.add_subplot()
    im = ax.imshow(D, cmap="viridis")
    fig.colorbar(im, ax=ax, label=r"$d_p$")
    if len(labels) <= 25:
        ax.set_xticks(range(len(labels)), labels, rotation=90)
        ax.set_yticks(range(len(labels)), labels)
    ax.set_title(title)
    return _save(fig, path)
