"""Delimited output and the figures rendered next to it.

Tables are written as CSV (header row, '.' decimals, no locale).  When a
table goes to a file, a PNG chart with the same stem is written beside it.
"""

from __future__ import annotations

import csv
import io
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def write_csv(header: Sequence[str], rows: Iterable[Sequence], out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def figure_path(out: str) -> Path:
    return Path(out).with_suffix(".png")


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def scatter_figure(rows: Sequence[tuple], path: Path, title: str,
                   xlabel: str = "S(A) + S(B)", ylabel: str = "S(AB)") -> Path:
    """Joint entropy against the sum of marginal entropies, with the line y = x."""
    plt = _pyplot()
    x = np.array([r[2] for r in rows])
    y = np.array([r[1] for r in rows])
    fig, ax = plt.subplots(figsize=(5, 5))
    above = y > x + 1e-9
    ax.scatter(x[~above], y[~above], s=4, color="tab:blue", label="subadditive")
    if above.any():
        ax.scatter(x[above], y[above], s=4, color="tab:red", label="violation")
    if len(x):
        lo, hi = float(min(x.min(), y.min())), float(max(x.max(), y.max()))
        ax.plot([lo, hi], [lo, hi], color="black", lw=1)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def bitflip_figure(rows: Sequence[tuple], grid_n: int, path: Path, kind: str) -> Path:
    """Heat maps of the four measures over (r, lambda)."""
    plt = _pyplot()
    data = np.array([r[2:6] for r in rows], dtype=float).reshape(grid_n, grid_n, 4)
    fig, axes = plt.subplots(2, 2, figsize=(8, 7))
    for k, (ax, name) in enumerate(zip(axes.ravel(), ("S", "H", "I", "K"))):
        im = ax.imshow(data[:, :, k].T, origin="lower", extent=(0, 1, 0, 1), aspect="auto", cmap="viridis")
        ax.set_title(f"{name} [{kind}]")
        ax.set_xlabel("r")
        ax.set_ylabel("lambda")
        fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
