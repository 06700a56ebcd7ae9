"""
States, events and the transition table of the governance state machine.

The table is data: ``TRANSITIONS`` maps every legal (state, event) pair to the
set of next states it may produce. Pairs with two successors are decided by
the metrics rules at step time. Anything absent is an illegal transition.
"""

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Any, FrozenSet, Mapping, Tuple


class GovState(str, Enum):
    PROPOSED = "Proposed"
    DELIBERATING = "Deliberating"
    VALIDATING = "Validating"
    VOTING = "Voting"
    EXECUTED = "Executed"
    VETOED = "Vetoed"
    REJECTED = "Rejected"


class EventKind(str, Enum):
    SUBMISSION_ACCEPTED = "SubmissionAccepted"
    DELIBERATION_EXPIRED = "DeliberationExpired"
    PROPOSER_WITHDRAWAL = "ProposerWithdrawal"
    VALIDATION_PASSED = "ValidationPassed"
    VALIDATION_FAILED = "ValidationFailed"
    VOTE_CLOSED = "VoteClosed"
    VETO_THRESHOLD_REACHED = "VetoThresholdReached"
    VETO_WINDOW_EXPIRED = "VetoWindowExpired"
    REVISED_RESUBMISSION = "RevisedResubmission"


class VoteDirection(str, Enum):
    FOR = "For"
    AGAINST = "Against"
    BLANK = "Blank"


@dataclass(frozen=True)
class GovEvent:
    """A triggering event. Time enters the engine only through ``t``."""

    kind: EventKind
    t: int
    payload: Mapping[str, Any] = field(default_factory=dict)


_S = GovState
_E = EventKind

TRANSITIONS: Mapping[Tuple[GovState, EventKind], FrozenSet[GovState]] = MappingProxyType(
    {
        (_S.PROPOSED, _E.SUBMISSION_ACCEPTED): frozenset({_S.DELIBERATING}),
        (_S.DELIBERATING, _E.DELIBERATION_EXPIRED): frozenset({_S.VALIDATING}),
        (_S.DELIBERATING, _E.PROPOSER_WITHDRAWAL): frozenset({_S.REJECTED}),
        (_S.VALIDATING, _E.VALIDATION_PASSED): frozenset({_S.VOTING}),
        (_S.VALIDATING, _E.VALIDATION_FAILED): frozenset({_S.REJECTED}),
        (_S.VOTING, _E.VOTE_CLOSED): frozenset({_S.EXECUTED, _S.REJECTED}),
        (_S.EXECUTED, _E.VETO_THRESHOLD_REACHED): frozenset({_S.VETOED}),
        (_S.EXECUTED, _E.VETO_WINDOW_EXPIRED): frozenset({_S.EXECUTED}),
        (_S.VETOED, _E.REVISED_RESUBMISSION): frozenset({_S.PROPOSED}),
    }
)


def table_rows() -> int:
    """Number of rows of the published table: one per successor, plus the
    event-less Rejected self-loop."""
    return sum(len(targets) for targets in TRANSITIONS.values()) + 1


def successors(state: GovState, event: EventKind) -> FrozenSet[GovState]:
    """Possible next states for a pair; empty when the pair is illegal."""
    return TRANSITIONS.get((GovState(state), EventKind(event)), frozenset())
