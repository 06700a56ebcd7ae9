"""Manipulation deterrence and collusion containment solvers."""

from .collusion import (
    BetaStar,
    CollusionOutcome,
    CollusionParams,
    beta_star,
    beta_star_closed_form,
    collusion_grid,
    collusion_loss,
)
from .deterrence import (
    DeterrenceReport,
    FStarResult,
    GameParams,
    cost,
    cost_curve,
    critical_faction,
    deterrence_report,
    gain,
    gain_curve,
    solve_critical_faction,
)

__all__ = [
    "BetaStar",
    "CollusionOutcome",
    "CollusionParams",
    "DeterrenceReport",
    "FStarResult",
    "GameParams",
    "beta_star",
    "beta_star_closed_form",
    "collusion_grid",
    "collusion_loss",
    "cost",
    "cost_curve",
    "critical_faction",
    "deterrence_report",
    "gain",
    "gain_curve",
    "solve_critical_faction",
]
