"""Gain versus cost figure for the deterrence report."""

from pathlib import Path
from typing import Union

from ..utils.plots import new_figure, save_figure
from .deterrence import DeterrenceReport


def plot_deterrence(report: DeterrenceReport, path: Union[str, Path]) -> Path:
    fig, ax = new_figure()
    ax.plot(report.f_grid, report.cost_samples, color="black", label="C(f)")
    for result, (q, samples) in zip(report.results, report.gain_samples.items()):
        (line,) = ax.plot(report.f_grid, samples, label=f"G(f, Q={q:g})")
        ax.axvline(result.f_star, color=line.get_color(), linestyle=":", linewidth=1)
    ax.set_xlabel("faction size f")
    ax.set_ylabel("utility")
    ax.set_xlim(0, 1)
    ax.legend()
    return save_figure(fig, path)
