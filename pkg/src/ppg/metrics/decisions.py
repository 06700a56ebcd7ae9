"""
Vote tallies and the pass / veto decision rules.
"""

from dataclasses import dataclass
from enum import Enum

from ..errors import ComponentOutOfRange, ZeroEligiblePopulation


class ApprovalDenominator(str, Enum):
    """Which votes form the denominator of the approval fraction."""

    ALL_CAST = "all_cast"
    DIRECTED_ONLY = "directed_only"


class PassOutcome(str, Enum):
    PASS = "Pass"
    FAIL_QUORUM = "FailQuorum"
    FAIL_APPROVAL = "FailApproval"

    @property
    def passed(self) -> bool:
        return self is PassOutcome.PASS


@dataclass(frozen=True)
class VoteTally:
    """Aggregate vote counts for one decision. Blank votes count as cast."""

    votes_for: int = 0
    votes_against: int = 0
    votes_blank: int = 0

    def __post_init__(self):
        if min(self.votes_for, self.votes_against, self.votes_blank) < 0:
            raise ComponentOutOfRange("tally counts must be non-negative")

    @property
    def total(self) -> int:
        return self.votes_for + self.votes_against + self.votes_blank

    @property
    def directed(self) -> int:
        return self.votes_for + self.votes_against

    def to_dict(self) -> dict:
        return {
            "for": self.votes_for,
            "against": self.votes_against,
            "blank": self.votes_blank,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VoteTally":
        return cls(
            votes_for=int(data.get("for", 0)),
            votes_against=int(data.get("against", 0)),
            votes_blank=int(data.get("blank", 0)),
        )


def participation_rate(votes: VoteTally, eligible: int) -> float:
    """R = V / P with blank votes included in V."""
    if eligible <= 0:
        raise ZeroEligiblePopulation("eligible population must be positive", detail=eligible)
    return votes.total / eligible


def approval_fraction(
    votes: VoteTally, denominator: ApprovalDenominator = ApprovalDenominator.ALL_CAST
) -> float:
    """V_for over the configured denominator; 0.0 when the denominator is empty."""
    if ApprovalDenominator(denominator) is ApprovalDenominator.ALL_CAST:
        base = votes.total
    else:
        base = votes.directed
    if base == 0:
        return 0.0
    return votes.votes_for / base


def pass_decision(
    votes: VoteTally,
    eligible: int,
    q: float,
    denominator: ApprovalDenominator = ApprovalDenominator.ALL_CAST,
) -> PassOutcome:
    """Apply the pass rule: R >= q and approval > 0.5.

    Quorum is checked first so the reported failure is deterministic.

    Raises:
        ZeroEligiblePopulation: If ``eligible`` is not positive
    """
    if participation_rate(votes, eligible) < q:
        return PassOutcome.FAIL_QUORUM
    if not approval_fraction(votes, denominator) > 0.5:
        return PassOutcome.FAIL_APPROVAL
    return PassOutcome.PASS


def veto_decision(veto_count: int, eligible: int, q_veto: float) -> bool:
    """True iff veto_count / P >= q_veto.

    Raises:
        ZeroEligiblePopulation: If ``eligible`` is not positive
    """
    if eligible <= 0:
        raise ZeroEligiblePopulation("eligible population must be positive", detail=eligible)
    return veto_count / eligible >= q_veto
