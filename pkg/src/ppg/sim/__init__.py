"""Stochastic participation simulator over Passive / Active / Strategic agents."""

from .archetypes import DEFAULT_POPULATION, ArchetypeName, ArchetypeParams, default_archetypes
from .rng import GENERATOR_ID, SeededStreams, Stage
from .simulator import (
    CSV_FIELDS,
    SWEEP_FIELDS,
    RoundResult,
    SimConfig,
    SimSummary,
    SimulationRun,
    StabilitySeries,
    SweepRow,
    archetype_series,
    quorum_sweep,
    run_round,
    run_simulation,
    seed_batch,
    stability_series,
    summarize,
)

__all__ = [
    "CSV_FIELDS",
    "DEFAULT_POPULATION",
    "GENERATOR_ID",
    "SWEEP_FIELDS",
    "ArchetypeName",
    "ArchetypeParams",
    "RoundResult",
    "SeededStreams",
    "SimConfig",
    "SimSummary",
    "SimulationRun",
    "StabilitySeries",
    "Stage",
    "SweepRow",
    "archetype_series",
    "default_archetypes",
    "quorum_sweep",
    "run_round",
    "run_simulation",
    "seed_batch",
    "stability_series",
    "summarize",
]
