"""Governance state machine: proposals, events and the transition function."""

from ..metrics import VoteTally
from .machine import (
    REQUIRED_FIELDS,
    AuditTrail,
    GovernanceEngine,
    Proposal,
    ProposalDraft,
    QuorumContext,
    always_compliant,
    check_draft,
)
from .states import (
    TRANSITIONS,
    EventKind,
    GovEvent,
    GovState,
    VoteDirection,
    successors,
    table_rows,
)

__all__ = [
    "REQUIRED_FIELDS",
    "TRANSITIONS",
    "AuditTrail",
    "EventKind",
    "GovEvent",
    "GovState",
    "GovernanceEngine",
    "Proposal",
    "ProposalDraft",
    "QuorumContext",
    "VoteDirection",
    "VoteTally",
    "always_compliant",
    "check_draft",
    "successors",
    "table_rows",
]
