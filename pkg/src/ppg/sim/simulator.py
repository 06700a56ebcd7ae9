"""
Stochastic participation simulator over the three behavioural archetypes.

Agents do not interact and keep no memory: a round depends on earlier rounds
only through its index. Every passed/vetoed flag is produced by the same
metrics functions the governance engine uses.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import EmptyQList, EmptyResults, InvalidSimConfig
from ..metrics import (
    ApprovalDenominator,
    LegitimacyWeights,
    PassOutcome,
    QuorumParams,
    VoteTally,
    approval_fraction,
    dynamic_quorum,
    legitimacy,
    participation_rate,
    pass_decision,
    veto_decision,
)
from ..utils.canonical import canonical_hash
from ..utils.file_ops import setup_logging, write_csv
from .archetypes import DEFAULT_POPULATION, ArchetypeName, ArchetypeParams, default_archetypes
from .rng import GENERATOR_ID, SeededStreams, Stage

logger = setup_logging(__name__)

CSV_FIELDS = [
    "round",
    "R",
    "approval",
    "passed",
    "vetoed",
    "rate_passive",
    "rate_active",
    "rate_strategic",
    "legitimacy",
]


@dataclass(frozen=True)
class SimConfig:
    """One simulation run. ``seed`` fully determines the output.

    ``sigma`` is the fixed impact score of every round's decision unless
    ``sigma_range`` is set, in which case sigma is drawn uniformly from it.
    ``approval_drift`` adds a per-round trend to every approval bias; it is
    off unless set.
    """

    rounds: int = 100
    archetypes: Tuple[ArchetypeParams, ...] = field(default_factory=default_archetypes)
    population: Tuple[int, ...] = DEFAULT_POPULATION
    quorum_params: QuorumParams = field(default_factory=QuorumParams)
    sigma: float = 0.0
    sigma_range: Optional[Tuple[float, float]] = None
    q_veto: float = 0.06
    seed: int = 0
    approval_denominator: ApprovalDenominator = ApprovalDenominator.ALL_CAST
    approval_drift: float = 0.0
    blank_share: float = 0.0
    veto_probability: float = 0.5
    delib_quality: float = 0.5
    legitimacy_weights: LegitimacyWeights = field(default_factory=LegitimacyWeights)
    stability_window: int = 10
    final_window: int = 20

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise InvalidSimConfig("; ".join(problems), detail=problems)

    def problems(self) -> List[str]:
        problems = []
        if self.rounds < 1:
            problems.append("rounds must be at least 1")
        if len(self.population) != len(self.archetypes):
            problems.append("population needs one count per archetype")
        if any(n < 0 for n in self.population) or sum(self.population) < 1:
            problems.append("total population must be at least 1")
        if not 0.0 <= self.sigma <= 1.0:
            problems.append("sigma must lie in [0, 1]")
        if self.sigma_range is not None:
            lo, hi = self.sigma_range
            if not 0.0 <= lo <= hi <= 1.0:
                problems.append("sigma_range must satisfy 0 <= low <= high <= 1")
        if not 0.0 < self.q_veto < 1.0:
            problems.append("q_veto must lie in (0, 1)")
        for name in ("blank_share", "veto_probability", "delib_quality"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                problems.append(f"{name} must lie in [0, 1]")
        if not math.isfinite(self.approval_drift):
            problems.append("approval_drift must be finite")
        if self.stability_window < 1 or self.final_window < 1:
            problems.append("windows must be at least one round")
        return problems

    @property
    def eligible(self) -> int:
        return int(sum(self.population))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rounds": self.rounds,
            "archetypes": [a.to_dict() for a in self.archetypes],
            "population": list(self.population),
            "quorum": {
                "q_base": self.quorum_params.q_base,
                "alpha": self.quorum_params.alpha,
            },
            "sigma": self.sigma,
            "sigma_range": list(self.sigma_range) if self.sigma_range else None,
            "q_veto": self.q_veto,
            "seed": self.seed,
            "approval_denominator": self.approval_denominator.value,
            "approval_drift": self.approval_drift,
            "blank_share": self.blank_share,
            "veto_probability": self.veto_probability,
            "delib_quality": self.delib_quality,
            "legitimacy_weights": {
                "w": list(self.legitimacy_weights.w),
                "a": list(self.legitimacy_weights.a),
            },
            "stability_window": self.stability_window,
            "final_window": self.final_window,
        }

    def config_hash(self) -> str:
        """Hash of everything except the seed."""
        data = self.to_dict()
        data.pop("seed")
        return canonical_hash(data)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SimConfig":
        """Build a config from a plain mapping; missing keys keep defaults.

        Raises:
            InvalidSimConfig: On unknown keys or invalid values
        """
        known = set(cls.__dataclass_fields__) | {"quorum"}
        unknown = set(data) - known
        if unknown:
            raise InvalidSimConfig(f"unknown simulation settings {sorted(unknown)}")
        kwargs: Dict[str, Any] = {}
        try:
            for key in (
                "rounds",
                "seed",
                "stability_window",
                "final_window",
            ):
                if key in data:
                    kwargs[key] = int(data[key])
            for key in (
                "sigma",
                "q_veto",
                "approval_drift",
                "blank_share",
                "veto_probability",
                "delib_quality",
            ):
                if key in data:
                    kwargs[key] = float(data[key])
            if "archetypes" in data:
                kwargs["archetypes"] = tuple(ArchetypeParams.from_dict(a) for a in data["archetypes"])
            if "population" in data:
                kwargs["population"] = tuple(int(n) for n in data["population"])
            quorum = data.get("quorum") or data.get("quorum_params")
            if quorum:
                kwargs["quorum_params"] = QuorumParams(
                    q_base=float(quorum.get("q_base", 0.2)),
                    alpha=float(quorum.get("alpha", 0.3)),
                )
            if data.get("sigma_range") is not None:
                lo, hi = data["sigma_range"]
                kwargs["sigma_range"] = (float(lo), float(hi))
            if "approval_denominator" in data:
                kwargs["approval_denominator"] = ApprovalDenominator(data["approval_denominator"])
            if "legitimacy_weights" in data:
                kwargs["legitimacy_weights"] = LegitimacyWeights.from_dict(data["legitimacy_weights"])
        except (TypeError, ValueError, KeyError) as e:
            raise InvalidSimConfig(f"cannot read simulation settings: {e}") from e
        return cls(**kwargs)


@dataclass(frozen=True)
class RoundResult:
    round: int
    R: float
    approval_frac: float
    passed: bool
    vetoed: bool
    per_archetype_rates: Tuple[float, ...]
    legitimacy: float
    tally: VoteTally
    veto_count: int
    quorum: float
    outcome: PassOutcome
    probabilities: Tuple[float, ...]

    def to_row(self) -> Dict[str, Any]:
        rates = dict(zip(("rate_passive", "rate_active", "rate_strategic"), self.per_archetype_rates))
        return {
            "round": self.round,
            "R": self.R,
            "approval": self.approval_frac,
            "passed": int(self.passed),
            "vetoed": int(self.vetoed),
            **rates,
            "legitimacy": self.legitimacy,
        }


@dataclass(frozen=True)
class SimSummary:
    rounds: int
    mean_R: float
    mean_approval: float
    pass_rate: float
    veto_rate: float
    final_mean_R: float
    final_mean_approval: float
    mean_legitimacy: float
    mean_archetype_rates: Dict[str, float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rounds": self.rounds,
            "mean_R": self.mean_R,
            "mean_approval": self.mean_approval,
            "pass_rate": self.pass_rate,
            "veto_rate": self.veto_rate,
            "final_mean_R": self.final_mean_R,
            "final_mean_approval": self.final_mean_approval,
            "mean_legitimacy": self.mean_legitimacy,
            "mean_archetype_rates": dict(self.mean_archetype_rates),
        }


@dataclass
class SimulationRun:
    config: SimConfig
    results: List[RoundResult]
    summary: SimSummary

    def rows(self) -> List[Dict[str, Any]]:
        return [r.to_row() for r in self.results]

    def header_comment(self) -> str:
        return (
            f"config_hash={self.config.config_hash()} "
            f"generator={GENERATOR_ID} seed={self.config.seed}"
        )

    def write_csv(self, path: Union[str, Path]) -> bool:
        return write_csv(self.rows(), str(path), CSV_FIELDS, header_comment=self.header_comment())


def _round_sigma(round_index: int, config: SimConfig, streams: SeededStreams) -> float:
    if config.sigma_range is None:
        return config.sigma
    lo, hi = config.sigma_range
    return float(streams.generator(round_index, Stage.SIGMA).uniform(lo, hi))


def run_round(
    round_index: int, config: SimConfig, streams: Optional[SeededStreams] = None
) -> RoundResult:
    """Simulate one decision round.

    Each agent of an archetype participates with probability
    clamp(base + drift * round + noise, 0, 1); participants vote Blank with
    ``blank_share``, otherwise For with the drifted approval bias. Every
    agent who voted Against registers a veto with ``veto_probability``.
    """
    streams = streams or SeededStreams(config.seed)
    part_rng = streams.generator(round_index, Stage.PARTICIPATION)
    vote_rng = streams.generator(round_index, Stage.VOTES)
    veto_rng = streams.generator(round_index, Stage.VETOES)

    votes_for = votes_against = votes_blank = 0
    rates: List[float] = []
    probabilities: List[float] = []
    for archetype, count in zip(config.archetypes, config.population):
        noise = part_rng.normal(0.0, archetype.noise_sd) if archetype.noise_sd > 0 else 0.0
        p = float(np.clip(archetype.drifted_rate(round_index) + noise, 0.0, 1.0))
        participants = int(part_rng.binomial(count, p))
        probabilities.append(p)
        rates.append(participants / count if count else 0.0)

        blank = int(vote_rng.binomial(participants, config.blank_share))
        bias = float(np.clip(archetype.approval_bias + config.approval_drift * round_index, 0.0, 1.0))
        in_favour = int(vote_rng.binomial(participants - blank, bias))
        votes_blank += blank
        votes_for += in_favour
        votes_against += participants - blank - in_favour

    tally = VoteTally(votes_for=votes_for, votes_against=votes_against, votes_blank=votes_blank)
    eligible = config.eligible
    quorum = dynamic_quorum(config.quorum_params, _round_sigma(round_index, config, streams))
    outcome = pass_decision(tally, eligible, quorum, config.approval_denominator)

    # drawn every round so runs that differ only in quorum stay paired
    veto_count = int(veto_rng.binomial(votes_against, config.veto_probability))
    vetoed = outcome.passed and veto_decision(veto_count, eligible, config.q_veto)

    R = participation_rate(tally, eligible)
    approval = approval_fraction(tally, config.approval_denominator)
    return RoundResult(
        round=round_index,
        R=R,
        approval_frac=approval,
        passed=outcome.passed,
        vetoed=vetoed,
        per_archetype_rates=tuple(rates),
        legitimacy=legitimacy(R, approval, config.delib_quality, config.legitimacy_weights),
        tally=tally,
        veto_count=veto_count,
        quorum=quorum,
        outcome=outcome,
        probabilities=tuple(probabilities),
    )


def summarize(config: SimConfig, results: Sequence[RoundResult]) -> SimSummary:
    if not results:
        raise EmptyResults("cannot summarize an empty run")
    n = len(results)
    tail = results[-min(config.final_window, n):]
    names = [a.name.value for a in config.archetypes]
    rates = np.array([r.per_archetype_rates for r in results])
    return SimSummary(
        rounds=n,
        mean_R=math.fsum(r.R for r in results) / n,
        mean_approval=math.fsum(r.approval_frac for r in results) / n,
        pass_rate=sum(r.passed for r in results) / n,
        veto_rate=sum(r.vetoed for r in results) / n,
        final_mean_R=math.fsum(r.R for r in tail) / len(tail),
        final_mean_approval=math.fsum(r.approval_frac for r in tail) / len(tail),
        mean_legitimacy=math.fsum(r.legitimacy for r in results) / n,
        mean_archetype_rates={name: float(rates[:, i].mean()) for i, name in enumerate(names)},
    )


def run_simulation(config: SimConfig) -> SimulationRun:
    """Run ``config.rounds`` rounds and summarize them."""
    started = time.perf_counter()
    streams = SeededStreams(config.seed)
    results = [run_round(t, config, streams) for t in range(config.rounds)]
    summary = summarize(config, results)
    logger.info(
        f"Simulation seed={config.seed}: {config.rounds} rounds, mean R={summary.mean_R:.4f}, "
        f"pass rate={summary.pass_rate:.2f}, veto rate={summary.veto_rate:.2f} "
        f"({time.perf_counter() - started:.2f}s)"
    )
    return SimulationRun(config=config, results=results, summary=summary)


@dataclass(frozen=True)
class SweepRow:
    q: float
    mean_R: float
    throughput: float
    veto_rate: float
    mean_approval: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "mean_R": self.mean_R,
            "throughput": self.throughput,
            "veto_rate": self.veto_rate,
            "mean_approval": self.mean_approval,
        }


SWEEP_FIELDS = ["q", "mean_R", "throughput", "veto_rate", "mean_approval"]


def quorum_sweep(
    config: SimConfig, q_values: Sequence[float], alpha: float = 0.0
) -> List[SweepRow]:
    """One summary row per quorum threshold, all rows on the same seed.

    Each row sets q_base = q and replaces the config's alpha with ``alpha``.
    The default of 0 keeps the impact score from moving the threshold.

    Raises:
        EmptyQList: If ``q_values`` is empty
        InvalidSimConfig: If a q is outside (0, 1)
    """
    if not q_values:
        raise EmptyQList("quorum sweep needs at least one q value")
    if alpha != config.quorum_params.alpha:
        logger.info(f"Quorum sweep uses alpha={alpha} in place of the configured alpha={config.quorum_params.alpha}")
    rows = []
    for q in q_values:
        if not 0.0 < q < 1.0:
            raise InvalidSimConfig("sweep quorum must lie in (0, 1)", detail=q)
        swept = replace(config, quorum_params=replace(config.quorum_params, q_base=float(q), alpha=float(alpha)))
        run = run_simulation(swept)
        rows.append(
            SweepRow(
                q=float(q),
                mean_R=run.summary.mean_R,
                throughput=run.summary.pass_rate,
                veto_rate=run.summary.veto_rate,
                mean_approval=run.summary.mean_approval,
            )
        )
    return rows


@dataclass(frozen=True)
class StabilitySeries:
    rounds: List[int]
    stability: List[float]
    reversal_rate: List[float]

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {"round": t, "stability": s, "reversal_rate": r}
            for t, s, r in zip(self.rounds, self.stability, self.reversal_rate)
        ]


def stability_series(results: Sequence[RoundResult], window: int = 10) -> StabilitySeries:
    """Stability = 1 - veto frequency over the trailing window (shorter at
    the start); reversal rate = cumulative vetoes / cumulative passes.

    Raises:
        EmptyResults: If ``results`` is empty
    """
    if not results:
        raise EmptyResults("stability series needs at least one round")
    if window < 1:
        raise InvalidSimConfig("stability window must be at least one round", detail=window)
    vetoed = np.array([r.vetoed for r in results], dtype=float)
    passed = np.array([r.passed for r in results], dtype=float)
    cum_vetoes = np.cumsum(vetoed)
    cum_passes = np.cumsum(passed)
    stability = []
    for i in range(len(results)):
        lo = max(0, i - window + 1)
        stability.append(1.0 - float(vetoed[lo : i + 1].mean()))
    reversal = np.divide(cum_vetoes, cum_passes, out=np.zeros_like(cum_vetoes), where=cum_passes > 0)
    return StabilitySeries(
        rounds=[r.round for r in results],
        stability=stability,
        reversal_rate=[float(x) for x in reversal],
    )


def archetype_series(
    results: Sequence[RoundResult], names: Sequence[str] = tuple(a.value for a in ArchetypeName)
) -> Dict[str, List[float]]:
    """Realized participation rate per archetype and round."""
    if not results:
        raise EmptyResults("archetype series needs at least one round")
    return {name: [r.per_archetype_rates[i] for r in results] for i, name in enumerate(names)}


def _run_for_seed(config: SimConfig) -> SimulationRun:
    return run_simulation(config)


def seed_batch(
    config: SimConfig, seeds: Sequence[int], workers: Optional[int] = None
) -> List[SimulationRun]:
    """Independent runs of ``config`` over ``seeds``, in seed order.

    With ``workers`` > 1 the runs execute in a process pool; results are the
    same either way.
    """
    configs = [replace(config, seed=int(s)) for s in seeds]
    if workers and workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_for_seed, configs))
    return [run_simulation(c) for c in configs]
