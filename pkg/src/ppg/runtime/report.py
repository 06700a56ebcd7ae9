"""
Legitimacy reporting and ledger-only reconstruction of proposal states.
"""

from dataclasses import replace
from typing import Any, Dict, Iterable, List, Mapping, Optional

from ..core import (
    AuditTrail,
    EventKind,
    GovernanceEngine,
    GovEvent,
    GovState,
    Proposal,
    ProposalDraft,
    QuorumContext,
)
from ..errors import LedgerFormatError, NoDecisions
from ..ledger import EntryKind, LedgerEntry
from ..metrics import ApprovalDenominator
from ..utils.file_ops import setup_logging, write_csv
from .instance import GovernanceInstance, proposal_state

logger = setup_logging(__name__)

REPORT_FIELDS = ["proposal", "cycle", "R", "approval", "delib", "legitimacy", "outcome", "running_mean"]


def legitimacy_report(
    instance: GovernanceInstance, filepath: Optional[str] = None
) -> List[Dict[str, Any]]:
    """One row per closed vote plus the running mean of L(i).

    Args:
        instance: Instance whose closed decisions are reported
        filepath: Optional CSV target

    Raises:
        NoDecisions: If no vote has closed yet
    """
    if not instance.decisions:
        raise NoDecisions("no vote has closed on this instance")
    rows: List[Dict[str, Any]] = []
    total = 0.0
    for n, decision in enumerate(instance.decisions, start=1):
        total += decision.legitimacy
        row = decision.to_dict()
        row["running_mean"] = total / n
        rows.append(row)
    if filepath:
        write_csv(rows, filepath, REPORT_FIELDS)
        logger.info(f"Wrote legitimacy report with {len(rows)} decisions to {filepath}")
    return rows


def _context(body: Mapping[str, Any], t: int) -> QuorumContext:
    deadline = body.get("veto_window_deadline")
    return QuorumContext(
        eligible=int(body.get("eligible") or 0),
        quorum=float(body.get("quorum") or 0.0),
        q_veto=float(body.get("q_veto") or 0.0),
        tau=int(deadline - t) if deadline is not None else 0,
        approval_denominator=ApprovalDenominator(
            body.get("approval_denominator", ApprovalDenominator.ALL_CAST.value)
        ),
    )


def _replay_record(engine: GovernanceEngine, proposals: Dict[str, Proposal], entry: LedgerEntry) -> None:
    body = entry.body
    pid = body["proposal_id"]
    event = body["event"]
    t = entry.timestamp

    if event == EventKind.SUBMISSION_ACCEPTED.value and pid not in proposals:
        proposals[pid] = engine.submit(ProposalDraft.from_dict(body["draft"]), t, pid)
        return

    p = proposals.get(pid)
    if p is None:
        raise LedgerFormatError(f"event {event} for unknown proposal {pid}", detail=entry.index)

    if event == "VoteCast":
        proposals[pid] = replace(p, vote_nullifiers=p.vote_nullifiers | {body["nullifier"]})
        return
    if event == "VetoRegistered":
        p = replace(
            p,
            veto_count=int(body["veto_count"]),
            veto_nullifiers=p.veto_nullifiers | {body["nullifier"]},
        )
        if body.get("threshold_reached"):
            p = engine.step(
                p,
                GovEvent(EventKind.VETO_THRESHOLD_REACHED, t, {"veto_count": p.veto_count}),
                _context(body, t),
            )
        proposals[pid] = p
        return

    kind = EventKind(event)
    payload: Dict[str, Any] = {}
    if kind in (EventKind.SUBMISSION_ACCEPTED, EventKind.REVISED_RESUBMISSION):
        payload["draft"] = body["draft"]
    elif kind is EventKind.VOTE_CLOSED:
        payload["tally"] = body["tally"]
    elif kind is EventKind.VETO_THRESHOLD_REACHED:
        payload["veto_count"] = body["veto_count"]
    elif kind is EventKind.VALIDATION_FAILED:
        payload["reason"] = body.get("reason", "")
    proposals[pid] = engine.step(p, GovEvent(kind, t, payload), _context(body, t))


def reconstruct_from_ledger(entries: Iterable[LedgerEntry]) -> Dict[str, Proposal]:
    """Rebuild every proposal from GovernanceEvent entries alone.

    Vote directions never reach the ledger, so an open vote's tally is only
    known once its VoteClosed entry is replayed.

    Raises:
        LedgerFormatError: If an event names a proposal that was never submitted
    """
    engine = GovernanceEngine(audit=AuditTrail())
    proposals: Dict[str, Proposal] = {}
    for entry in entries:
        if entry.kind is EntryKind.GOVERNANCE_EVENT:
            _replay_record(engine, proposals, entry)
    return proposals


def reconstructed_states(entries: Iterable[LedgerEntry]) -> Dict[str, Dict[str, Any]]:
    proposals = reconstruct_from_ledger(entries)
    return {pid: proposal_state(p) for pid, p in sorted(proposals.items())}


def state_mismatches(
    live: Mapping[str, Mapping[str, Any]], rebuilt: Mapping[str, Mapping[str, Any]]
) -> List[str]:
    """Fields where a reconstructed state differs from the live one.

    The tally of a proposal still in Voting is not compared.
    """
    problems: List[str] = []
    for pid in sorted(set(live) | set(rebuilt)):
        if pid not in live or pid not in rebuilt:
            problems.append(f"{pid}: present on one side only")
            continue
        for key, value in live[pid].items():
            if key == "tally" and live[pid]["state"] == GovState.VOTING.value:
                continue
            if rebuilt[pid].get(key) != value:
                problems.append(f"{pid}.{key}: live={value!r} rebuilt={rebuilt[pid].get(key)!r}")
    return problems
