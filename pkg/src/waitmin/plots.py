"""Figure rendering for sweep output tables.

Each CSV kind gets a matching PNG next to it: queue-length distributions
on a log probability axis, waiting-time curves with simulation error bars
when present, optimizer summaries, and normalized-wait collapses. The Agg
backend is forced so rendering works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sweeps import SweepArtifact

__all__ = ["render", "render_all"]

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
}


def _load(path: Path) -> np.ndarray:
    data = np.genfromtxt(path, delimiter=",", names=True)
    # a single data row comes back 0-d; normalize so columns are always arrays
    return np.atleast_1d(data)


def _ratio_label(ratio: float | None) -> str:
    return "" if ratio is None else f" (lambda/mu = {ratio:g})"


def _plot_pmf(ax: plt.Axes, table: np.ndarray, art: SweepArtifact) -> None:
    ax.semilogy(table["l"], table["pi_l"], lw=1.2)
    ax.set_xlabel("queue length l")
    ax.set_ylabel("stationary probability")
    ax.set_title(f"queue-length distribution, d = {art.d}{_ratio_label(art.ratio)}")


def _plot_wait_curve(ax: plt.Axes, table: np.ndarray, art: SweepArtifact) -> None:
    ax.plot(table["d"], table["w_bar"], lw=1.2, label="analytic")
    if "sim_mean" in (table.dtype.names or ()):
        ax.errorbar(
            table["d"],
            table["sim_mean"],
            yerr=table["sim_ci"],
            fmt="o",
            ms=3,
            lw=0.8,
            capsize=2,
            label="simulated (95% CI)",
        )
        ax.legend()
    ax.set_xlabel("pickup threshold d")
    ax.set_ylabel("mean wait")
    ax.set_title(f"mean wait vs threshold{_ratio_label(art.ratio)}")


def _plot_optimum(ax: plt.Axes, table: np.ndarray, art: SweepArtifact) -> None:
    ax.loglog(table["lambda_over_mu"], table["d_star"], "o-", ms=3, lw=1.0, label="d*")
    ax.loglog(
        table["lambda_over_mu"],
        table["d_heuristic"],
        "--",
        lw=1.0,
        label="ceil(0.9 lambda/mu)",
    )
    ax.set_xlabel("lambda / mu")
    ax.set_ylabel("optimal threshold")
    ax.set_title("wait-minimizing threshold vs load")
    ax.legend()


def _plot_normalized(ax: plt.Axes, table: np.ndarray, art: SweepArtifact) -> None:
    ax.plot(table["d_mu_over_lambda"], table["mu_w_bar"], lw=1.2)
    ax.set_xlabel("d mu / lambda")
    ax.set_ylabel("mu x mean wait")
    ax.set_title(f"normalized wait{_ratio_label(art.ratio)}")


_RENDERERS = {
    "pmf": _plot_pmf,
    "wait_curve": _plot_wait_curve,
    "optimum": _plot_optimum,
    "normalized_by_ratio": _plot_normalized,
}


def render(artifact: SweepArtifact) -> Path:
    """Render one sweep CSV to a PNG beside it and return the PNG path."""
    table = _load(artifact.path)
    png = artifact.path.with_suffix(".png")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            _RENDERERS[artifact.kind](ax, table, artifact)
            fig.tight_layout()
            fig.savefig(png)
        finally:
            plt.close(fig)
    return png


def render_all(artifacts: list[SweepArtifact]) -> list[Path]:
    return [render(a) for a in artifacts]
