"""Figures for simulation runs and quorum sweeps."""

from pathlib import Path
from typing import Sequence, Union

from ..utils.plots import new_figure, save_figure
from .simulator import SimulationRun, SweepRow, archetype_series, stability_series


def plot_participation(run: SimulationRun, path: Union[str, Path]) -> Path:
    rounds = [r.round for r in run.results]
    fig, (top, bottom) = new_figure(nrows=2, height=6.0)
    top.plot(rounds, [r.R for r in run.results], label="R")
    top.plot(rounds, [r.approval_frac for r in run.results], label="approval")
    top.axhline(0.5, color="grey", linestyle=":", linewidth=1)
    top.set_ylabel("rate")
    top.legend()
    for name, series in archetype_series(run.results).items():
        bottom.plot(rounds, series, label=name)
    bottom.set_xlabel("round")
    bottom.set_ylabel("participation")
    bottom.legend()
    return save_figure(fig, path)


def plot_stability(run: SimulationRun, path: Union[str, Path]) -> Path:
    series = stability_series(run.results, run.config.stability_window)
    fig, ax = new_figure()
    ax.plot(series.rounds, series.stability, label="stability")
    ax.plot(series.rounds, series.reversal_rate, label="reversal rate")
    ax.set_xlabel("round")
    ax.set_ylim(0, 1.05)
    ax.legend()
    return save_figure(fig, path)


def plot_sweep(rows: Sequence[SweepRow], path: Union[str, Path]) -> Path:
    qs = [row.q for row in rows]
    fig, ax = new_figure()
    ax.plot(qs, [row.mean_R for row in rows], marker="o", label="mean R")
    ax.plot(qs, [row.throughput for row in rows], marker="s", label="throughput")
    ax.plot(qs, [row.veto_rate for row in rows], marker="^", label="veto rate")
    ax.set_xlabel("quorum q")
    ax.legend()
    return save_figure(fig, path)
