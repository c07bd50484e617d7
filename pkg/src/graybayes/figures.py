"""Figure rendering for CLI reports.

Every report path renders a PNG next to its delimited output so results can
be eyeballed without extra tooling.  The Agg backend keeps this headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bayes import ProbabilityMap
from .gradient import LookupTable

_STYLE = {
    "figure.figsize": (6.0, 4.5),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def render_probability_map(pmap: ProbabilityMap, label: str, path: str) -> None:
    """Posterior heatmap of one feature channel; absent borders render blank."""
    plane = pmap.channel(label)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        shown = ax.imshow(plane, cmap="magma", vmin=0.0, vmax=1.0, interpolation="nearest")
        fig.colorbar(shown, ax=ax, label=f"P({label})")
        ax.set_title(f"posterior of {label}")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.grid(False)
        fig.savefig(path, bbox_inches="tight")
        plt.close(fig)


def render_lookup_profile(table: LookupTable, path: str) -> None:
    """Mean posterior against gradient magnitude with the min-max band.

    A tight band means the gradient is a faithful probability surrogate; a
    wide band shows how much the magnitude alone discards.
    """
    g = np.array([r.magnitude for r in table.rows])
    lo = np.array([r.min_posterior for r in table.rows])
    mid = np.array([r.mean_posterior for r in table.rows])
    hi = np.array([r.max_posterior for r in table.rows])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.fill_between(g, lo, hi, alpha=0.25, label="min to max")
        ax.plot(g, mid, marker="o", label="mean")
        ax.set_xlabel("gradient magnitude")
        ax.set_ylabel("boundary posterior")
        ax.set_ylim(-0.02, 1.02)
        ax.set_title(f"gradient to probability (p_b={table.p_b}, {table.boundary_mode})")
        ax.legend()
        fig.savefig(path, bbox_inches="tight")
        plt.close(fig)
