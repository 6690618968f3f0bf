"""Matplotlib figures written to files (Agg backend, never shown)."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .certify import contour_grid  # noqa: E402
from .fields import Field  # noqa: E402


def contour_figure(
    fields: Sequence["Field | str"],
    path: "str | Path",
    resolution: int = 200,
    threshold: Optional[float] = None,
    mark: Optional[tuple] = None,
) -> Path:
    """Contour plot of one or more fields; with ``threshold`` the super-level
    sets {field > threshold} are shaded, one hatch colour per field."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.5, 5))
    colours = ["tab:red", "tab:blue", "tab:green", "tab:orange"]
    for i, f in enumerate(fields):
        f = Field.parse(f) if isinstance(f, str) else f
        X, Y, V = contour_grid(f, resolution)
        colour = colours[i % len(colours)]
        if threshold is None:
            cs = ax.contour(X, Y, V, levels=12, colors=colour, linewidths=0.8)
            ax.clabel(cs, fontsize=6, fmt="%.2f")
        else:
            ax.contourf(X, Y, (V > threshold).astype(float), levels=[0.5, 1.5], colors=[colour], alpha=0.35)
            ax.contour(X, Y, V, levels=[threshold], colors=colour, linewidths=1.0)
        ax.plot([], [], color=colour, label=f.label)
    if mark is not None:
        ax.plot(*mark, marker="*", color="k", markersize=9, linestyle="none", label="argmax")
    ax.set_xlabel("x = t/k")
    ax.set_ylabel("y = s/k")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    title = "level sets" if threshold is None else f"regions where value > {threshold:g}"
    ax.set_title(title)
    ax.legend(loc="upper left", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def trace_figure(records: Sequence[dict], path: "str | Path", title: str = "") -> Path:
    """Two panels: tracked densities per step and log2 of the set sizes."""
    path = Path(path)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.5, 6), sharex=True)
    steps = np.arange(1, len(records) + 1)
    for key in ("p_after", "p_R_after", "p_B_after"):
        vals = [r.get(key) for r in records]
        if any(v is not None for v in vals):
            ax1.plot(steps, [np.nan if v is None else v for v in vals], marker=".", lw=0.8, label=key)
    kinds = sorted({r.get("kind", "?") for r in records})
    for j, kind in enumerate(kinds):
        xs = [i + 1 for i, r in enumerate(records) if r.get("kind") == kind]
        ax1.scatter(xs, [ax1.get_ylim()[0]] * len(xs), marker="|", s=40, label=kind, color=f"C{j + 3}")
    ax1.set_ylabel("density")
    ax1.legend(fontsize=7, ncol=3)
    for key in ("x_after", "y_after", "z_after"):
        vals = [r.get(key) for r in records]
        if any(v is not None for v in vals):
            arr = np.array([np.nan if not v else np.log2(v) for v in vals], dtype=float)
            ax2.plot(steps, arr, marker=".", lw=0.8, label=key.split("_")[0].upper())
    ax2.set_ylabel("log2 |set|")
    ax2.set_xlabel("step")
    ax2.legend(fontsize=7)
    if title:
        ax1.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
