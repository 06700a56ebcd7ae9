"""
Script to regenerate every simulation and game-theory table in one go.
Writes participation runs, the quorum sweep, the deterrence curves and the
collusion grid under data/experiments/.
"""

import argparse
import os
from dataclasses import replace
from typing import List

import numpy as np

from ppg.gametheory import CollusionParams, GameParams, collusion_grid, deterrence_report
from ppg.gametheory.plots import plot_deterrence
from ppg.sim import SWEEP_FIELDS, SimConfig, quorum_sweep, run_simulation, seed_batch
from ppg.sim.plots import plot_participation, plot_stability, plot_sweep
from ppg.utils.file_ops import (
    ensure_directory_exists,
    generate_timestamped_filename,
    get_data_directory,
    save_json_data,
    set_log_level,
    setup_logging,
    write_csv,
)

logger = setup_logging(__name__)

Q_VALUES = [0.2, 0.3, 0.4]
NORM_DRIFT = 0.001


def run_simulations(output_dir: str, seeds: List[int], workers: int) -> None:
    config = SimConfig()
    runs = seed_batch(config, seeds, workers=workers)
    for run in runs:
        run.write_csv(os.path.join(output_dir, f"sim_seed{run.config.seed:03d}.csv"))
    save_json_data(
        {str(run.config.seed): run.summary.to_dict() for run in runs},
        os.path.join(output_dir, generate_timestamped_filename("sim_summaries")),
    )
    plot_participation(runs[0], os.path.join(output_dir, "participation.png"))
    plot_stability(runs[0], os.path.join(output_dir, "stability.png"))

    norms = run_simulation(replace(config, approval_drift=NORM_DRIFT, seed=seeds[0]))
    norms.write_csv(os.path.join(output_dir, f"sim_norms_seed{seeds[0]:03d}.csv"))
    plot_stability(norms, os.path.join(output_dir, "stability_norms.png"))

    rows = quorum_sweep(config, Q_VALUES)
    write_csv(
        [r.to_dict() for r in rows],
        os.path.join(output_dir, "quorum_sweep.csv"),
        SWEEP_FIELDS,
        header_comment=f"config_hash={config.config_hash()} seed={config.seed}",
    )
    plot_sweep(rows, os.path.join(output_dir, "quorum_sweep.png"))
    logger.info(f"Simulation tables for {len(seeds)} seeds saved to {output_dir}")


def run_game_theory(output_dir: str, faction: float) -> None:
    params = GameParams()
    report = deterrence_report(Q_VALUES, params)
    write_csv(report.curve_rows(), os.path.join(output_dir, "deterrence_curves.csv"), report.curve_fieldnames())
    write_csv(
        report.summary_rows(),
        os.path.join(output_dir, "critical_faction.csv"),
        ["q", "f_star", "first_crossing", "reentry", "no_profitable_manipulation"],
    )
    plot_deterrence(report, os.path.join(output_dir, "deterrence.png"))

    q_bases = [float(x) for x in np.linspace(0.20, 0.38, 10)]
    alphas = [float(x) for x in np.linspace(0.0, 0.18, 10)]
    rows = collusion_grid(q_bases, alphas, faction, CollusionParams(), params)
    write_csv(rows, os.path.join(output_dir, "collusion_grid.csv"), ["q_base", "alpha", "f", "beta_star"])
    logger.info(f"Game-theory tables saved to {output_dir}")


def main() -> None:
    parser = argparse.ArgumentParser(description="Regenerate simulation and game-theory tables")
    parser.add_argument("--seeds", type=int, default=30, help="Number of simulation seeds")
    parser.add_argument("--workers", type=int, default=1, help="Process pool size")
    parser.add_argument("--faction", type=float, default=0.2, help="Faction size for the collusion grid")
    parser.add_argument("--output-dir", help="Output directory (default: data/experiments)")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    args = parser.parse_args()
    set_log_level(args.log_level, prefixes=("ppg", __name__))

    output_dir = args.output_dir or get_data_directory("experiments")
    ensure_directory_exists(output_dir)
    run_simulations(output_dir, list(range(args.seeds)), args.workers)
    run_game_theory(output_dir, args.faction)
    print(f"All experiment tables saved to: {output_dir}")


if __name__ == "__main__":
    main()
