"""
Command-line interface for the PPG governance engine.
Provides one entry point for scenario replay, ledger audit, the participation
simulator and the game-theory solvers.
"""

import argparse
import json
import os
import sys
from typing import List, Optional

from ppg.config import create_config, load_settings
from ppg.errors import PPGError
from ppg.gametheory import (
    CollusionOutcome,
    CollusionParams,
    GameParams,
    beta_star,
    deterrence_report,
    solve_critical_faction,
)
from ppg.gametheory.plots import plot_deterrence
from ppg.ledger import Ledger, verify_file
from ppg.runtime import legitimacy_report, random_scenario, replay, scenario_lines
from ppg.sim import SWEEP_FIELDS, SimConfig, quorum_sweep, run_simulation
from ppg.sim.plots import plot_participation, plot_stability, plot_sweep
from ppg.utils.file_ops import (
    ensure_directory_exists,
    load_json_data,
    set_log_level,
    setup_logging,
    write_csv,
    write_lines,
)

logger = setup_logging(__name__)


def parse_floats(text: str) -> List[float]:
    """Parse a comma-separated list such as "0.2,0.3,0.4"."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Participatory governance engine, ledger audit, simulator and solvers")
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level",
    )
    groups = parser.add_subparsers(dest="group", required=True)

    # engine
    engine = groups.add_parser("engine", help="Governance engine").add_subparsers(dest="command", required=True)
    rep = engine.add_parser("replay", help="Replay a scenario script")
    rep.add_argument("--scenario", required=True, help="Line-delimited JSON scenario")
    rep.add_argument("--config", help="JSON or YAML configuration file")
    rep.add_argument("--environment", choices=["sandbox", "production"], help="Override the profile")
    rep.add_argument("--seed", type=int, help="Seed for the sandbox profile")
    rep.add_argument("--ledger-out", help="Ledger file to write")
    rep.add_argument("--report-out", help="Legitimacy report CSV to write")
    gen = engine.add_parser("random-scenario", help="Generate a random legal scenario")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--citizens", type=int, default=60)
    gen.add_argument("--proposals", type=int, default=3)
    gen.add_argument("--out", required=True)

    # ledger
    ledger = groups.add_parser("ledger", help="Ledger audit").add_subparsers(dest="command", required=True)
    ver = ledger.add_parser("verify", help="Verify hashes, links and signatures")
    ver.add_argument("file")
    ver.add_argument("--public-key", help="Hex Ed25519 public key (default: the header's key)")
    qry = ledger.add_parser("query", help="Select entries")
    qry.add_argument("file")
    qry.add_argument("--kind")
    qry.add_argument("--proposal")
    qry.add_argument("--budget-line")
    qry.add_argument("--from", dest="t_from", type=int)
    qry.add_argument("--to", dest="t_to", type=int)
    sts = ledger.add_parser("stats", help="Entry counts and totals")
    sts.add_argument("file")

    # sim
    sim = groups.add_parser("sim", help="Participation simulator").add_subparsers(dest="command", required=True)
    run = sim.add_parser("run", help="Run one simulation")
    sweep = sim.add_parser("sweep", help="Sweep fixed quorum thresholds")
    sweep.add_argument("--q", type=parse_floats, default=[0.2, 0.3, 0.4])
    sweep.add_argument("--alpha", type=float, default=0.0, help="Impact weight alpha held for every row")
    for sub in (run, sweep):
        sub.add_argument("--config", help="JSON simulation settings")
        sub.add_argument("--seed", type=int)
        sub.add_argument("--rounds", type=int)
        sub.add_argument("--out", required=True, help="CSV output path")
        sub.add_argument("--plot", help="Write a figure to this path")

    # game
    game = groups.add_parser("game", help="Game-theory solvers").add_subparsers(dest="command", required=True)
    fstar = game.add_parser("fstar", help="Critical faction size")
    fstar.add_argument("--q", type=float, required=True)
    gsweep = game.add_parser("sweep", help="f* and curves over several quorums")
    gsweep.add_argument("--q", type=parse_floats, default=[0.2, 0.3, 0.4])
    gsweep.add_argument("--out", required=True, help="Curve CSV output path")
    gsweep.add_argument("--plot", help="Write a figure to this path")
    beta = game.add_parser("beta", help="Critical discount factor")
    beta.add_argument("--f", type=float, required=True)
    beta.add_argument("--qbase", type=float, default=0.2)
    beta.add_argument("--alpha", type=float, default=0.3)
    beta.add_argument("--horizon", type=int, default=10, help="Rounds of loss before capture")
    beta.add_argument("--capture-gain", type=float, help="Per-round capture gain (default: g_max)")
    beta.add_argument("--sigma-bar", type=float, default=0.5)
    for sub in (fstar, gsweep, beta):
        sub.add_argument("--gmax", type=float, default=0.80)
        sub.add_argument("--k", type=float, default=6.0)
        sub.add_argument("--c1", type=float, default=0.55)
        sub.add_argument("--c2", type=float, default=0.08)

    return parser


# engine


def cmd_engine_replay(args: argparse.Namespace) -> int:
    settings = load_settings(args.config, args.environment) if args.config else create_config(
        args.environment or "sandbox"
    )
    if args.seed is not None:
        settings.seed = args.seed
    problems = settings.validate()
    if problems:
        for problem in problems:
            logger.error(f"Configuration problem: {problem}")
        return 1
    logger.info(f"Replay settings: {settings.get_environment_info()}")
    if args.ledger_out:
        ensure_directory_exists(os.path.dirname(args.ledger_out))
        if os.path.exists(args.ledger_out):
            os.remove(args.ledger_out)
    instance = replay(args.scenario, settings, args.ledger_out)
    for pid, state in instance.states().items():
        print(f"{pid}: {state['state']}{' (terminal)' if state['terminal'] else ''} cycle={state['cycle']}")
    print(f"Ledger: {len(instance.ledger)} entries, head {instance.ledger.head.hex()}")
    if args.report_out:
        if instance.decisions:
            legitimacy_report(instance, args.report_out)
            print(f"Legitimacy report saved to: {args.report_out}")
        else:
            logger.warning("No vote closed; legitimacy report not written")
    return 0


def cmd_engine_random(args: argparse.Namespace) -> int:
    actions = random_scenario(args.seed, citizens=args.citizens, proposals=args.proposals)
    count = write_lines(scenario_lines(actions), args.out)
    print(f"Wrote {count} scenario lines to {args.out}")
    return 0


# ledger


def cmd_ledger_verify(args: argparse.Namespace) -> int:
    result = verify_file(args.file, args.public_key)
    print(str(result) if result.ok else f"{result}: {result.reason}")
    return 0 if result.ok else 1


def cmd_ledger_query(args: argparse.Namespace) -> int:
    ledger = Ledger.load(args.file)
    criteria = {
        "kind": args.kind,
        "proposal_id": args.proposal,
        "budget_line": args.budget_line,
        "from": args.t_from,
        "to": args.t_to,
    }
    for line in (entry.to_line() for entry in ledger.query(criteria)):
        print(line.decode("utf-8"))
    return 0


def cmd_ledger_stats(args: argparse.Namespace) -> int:
    print(json.dumps(Ledger.load(args.file).stats(), indent=2, sort_keys=True))
    return 0


# sim


def _sim_config(args: argparse.Namespace) -> SimConfig:
    data = {}
    if args.config:
        data = load_json_data(args.config)
        if not isinstance(data, dict):
            raise PPGError("simulation config must be a JSON object", detail=args.config)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.rounds is not None:
        data["rounds"] = args.rounds
    return SimConfig.from_dict(data)


def cmd_sim_run(args: argparse.Namespace) -> int:
    config = _sim_config(args)
    run = run_simulation(config)
    run.write_csv(args.out)
    print(json.dumps(run.summary.to_dict(), indent=2))
    if args.plot:
        plot_participation(run, args.plot)
        root, ext = os.path.splitext(args.plot)
        plot_stability(run, f"{root}_stability{ext or '.png'}")
    return 0


def cmd_sim_sweep(args: argparse.Namespace) -> int:
    config = _sim_config(args)
    rows = quorum_sweep(config, args.q, alpha=args.alpha)
    write_csv(
        [r.to_dict() for r in rows],
        args.out,
        SWEEP_FIELDS,
        header_comment=f"config_hash={config.config_hash()} seed={config.seed}",
    )
    for row in rows:
        print(
            f"q={row.q:g}: mean R={row.mean_R:.4f} throughput={row.throughput:.2f} "
            f"veto rate={row.veto_rate:.2f}"
        )
    if args.plot:
        plot_sweep(rows, args.plot)
    return 0


# game


def _game_params(args: argparse.Namespace) -> GameParams:
    return GameParams(g_max=args.gmax, k=args.k, c1=args.c1, c2=args.c2)


def cmd_game_fstar(args: argparse.Namespace) -> int:
    result = solve_critical_faction(args.q, _game_params(args))
    print(json.dumps(result.to_dict(), indent=2))
    return 0


def cmd_game_sweep(args: argparse.Namespace) -> int:
    report = deterrence_report(args.q, _game_params(args))
    write_csv(report.curve_rows(), args.out, report.curve_fieldnames())
    for result in report.results:
        print(f"q={result.q:g}: f*={result.f_star:.6f}")
    if args.plot:
        plot_deterrence(report, args.plot)
    return 0


def cmd_game_beta(args: argparse.Namespace) -> int:
    cp = CollusionParams(
        capture_horizon=args.horizon, capture_gain=args.capture_gain, sigma_bar=args.sigma_bar
    )
    result = beta_star(args.qbase, args.alpha, args.f, cp, _game_params(args))
    print(result.value if isinstance(result, CollusionOutcome) else f"beta*={result:.9f}")
    return 0


COMMANDS = {
    ("engine", "replay"): cmd_engine_replay,
    ("engine", "random-scenario"): cmd_engine_random,
    ("ledger", "verify"): cmd_ledger_verify,
    ("ledger", "query"): cmd_ledger_query,
    ("ledger", "stats"): cmd_ledger_stats,
    ("sim", "run"): cmd_sim_run,
    ("sim", "sweep"): cmd_sim_sweep,
    ("game", "fstar"): cmd_game_fstar,
    ("game", "sweep"): cmd_game_sweep,
    ("game", "beta"): cmd_game_beta,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    args = build_parser().parse_args(argv)
    set_log_level(args.log_level)
    logger.setLevel(args.log_level)
    try:
        return COMMANDS[(args.group, args.command)](args)
    except PPGError as e:
        logger.error(f"{args.group} {args.command} failed: {e}")
        return 2
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
