"""Closed-form governance mathematics: impact, quorum, decisions, legitimacy."""

from .decisions import (
    ApprovalDenominator,
    PassOutcome,
    VoteTally,
    approval_fraction,
    participation_rate,
    pass_decision,
    veto_decision,
)
from .impact import (
    ImpactInputs,
    QuorumParams,
    Reversibility,
    dynamic_quorum,
    impact_score,
)
from .legitimacy import (
    Argument,
    DelibArchive,
    LegitimacyWeights,
    delib_components,
    delib_quality,
    legitimacy,
)

__all__ = [
    "ApprovalDenominator",
    "Argument",
    "DelibArchive",
    "ImpactInputs",
    "LegitimacyWeights",
    "PassOutcome",
    "QuorumParams",
    "Reversibility",
    "VoteTally",
    "approval_fraction",
    "delib_components",
    "delib_quality",
    "dynamic_quorum",
    "impact_score",
    "legitimacy",
    "participation_rate",
    "pass_decision",
    "veto_decision",
]
