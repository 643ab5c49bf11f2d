"""Optional figure rendering for run reports.

Renders the energy growth curves and the final-time moment fields next to
the CSV output.  Figures are a convenience view of the delimited data; the
CSV/JSON files remain the canonical record.
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import PRIMARY_COMPONENTS, RunReport
from .models import get_model

_MOMENT_LABELS = {
    1: "mean",
    2: "second moment",
    3: "third moment",
    4: "fourth moment",
}


def _plot_energy(ax, entry: dict, title: str) -> None:
    times = np.asarray(entry["times"])
    if entry.get("wce") is not None:
        ax.plot(times, entry["wce"], label="chaos expansion", lw=1.5)
    if entry.get("mc") is not None:
        ax.plot(times, entry["mc"], label="Monte Carlo", lw=1.0, ls="--")
    ax.plot(times, entry["reference"], label="linear law", lw=1.0, ls=":", color="k")
    ax.set_xlabel("t")
    ax.set_ylabel("averaged energy")
    ax.set_title(title)
    ax.legend(fontsize=8)


def render_report(report: RunReport, outdir: str) -> list[str]:
    """Write PNG figures for a report; returns the created paths."""
    os.makedirs(outdir, exist_ok=True)
    written: list[str] = []

    if report.sigma_scan is not None:
        n = len(report.sigma_scan)
        fig, axes = plt.subplots(1, n, figsize=(4.2 * n, 3.2), squeeze=False)
        for ax, (sigma_key, entry) in zip(axes[0], report.sigma_scan.items()):
            _plot_energy(ax, entry, f"sigma = {sigma_key}")
        fig.tight_layout()
        path = os.path.join(outdir, "energy_scan.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
        return written

    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    _plot_energy(ax, report.energy, "averaged energy growth")
    fig.tight_layout()
    path = os.path.join(outdir, "energy.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    if report.wce_moments is None and report.mc_moments is None:
        return written

    model = get_model(report.config["model"])
    grid = report.grid
    for name in PRIMARY_COMPONENTS[report.config["model"]]:
        comp = model.component_index(name)
        fig, axes = plt.subplots(2, 2, figsize=(9, 6))
        for order, ax in zip((1, 2, 3, 4), axes.ravel()):
            if grid.dim == 1:
                x = grid.axes()[0]
                if report.wce_moments is not None:
                    ax.plot(x, report.wce_moments.moment(order, comp),
                            label="chaos expansion", lw=1.5)
                if report.mc_moments is not None:
                    ax.plot(x, report.mc_moments.moment(order, comp),
                            label="Monte Carlo", lw=1.0, ls="--")
                ax.set_xlabel("x")
                ax.legend(fontsize=7)
            else:
                mf = report.wce_moments or report.mc_moments
                data = mf.moment(order, comp)
                if grid.dim == 3:
                    data = data[:, :, 0]  # z = 0 plane
                im = ax.imshow(data.T, origin="lower", aspect="auto",
                               extent=(0, grid.extent[0], 0, grid.extent[1]))
                fig.colorbar(im, ax=ax, shrink=0.8)
                ax.set_xlabel("x")
                ax.set_ylabel("y")
            ax.set_title(f"{name} {_MOMENT_LABELS[order]}")
        fig.tight_layout()
        path = os.path.join(outdir, f"moments_{name}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
