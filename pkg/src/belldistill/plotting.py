"""Figure output for sweep reports."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .pipeline import SweepRow  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.5,
    "figure.figsize": (4.5, 3.2),
    # keep PNG bytes stable between runs
    "svg.hashsalt": "belldistill",
}


def _finite(xs: Sequence[float], ys: Sequence[float]) -> tuple[list[float], list[float]]:
    pts = [(x, y) for x, y in zip(xs, ys) if math.isfinite(y)]
    return [p[0] for p in pts], [p[1] for p in pts]


def plot_sweep(rows: Sequence[SweepRow], path: str | Path) -> Path:
    """log10 L against Werner fidelity; proposed solid, DEJ dashed."""
    path = Path(path)
    F = [r.F for r in rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(*_finite(F, [r.log10L_proposed for r in rows]), "-", color="k", label="n=4 proposed")
        ax.plot(*_finite(F, [r.log10L_dej for r in rows]), "--", color="k", label="n=2 DEJ")
        ax.set_xlabel("Werner fidelity F")
        ax.set_ylabel(r"$\log_{10} L$")
        ax.legend(frameon=False)
        ax.grid(alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, dpi=150, metadata={"Software": None})
        plt.close(fig)
    return path
