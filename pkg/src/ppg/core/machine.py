"""
Governance engine: proposal records and the state transition function.

Proposals are immutable snapshots; every operation returns a new record and
writes exactly one audit record. The engine never reads a clock. Timers
(deliberation period, veto window) expire only through explicit events.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, FrozenSet, List, Mapping, Optional, Protocol

from ..errors import (
    DuplicateNullifier,
    IllegalTransition,
    MalformedImpactInputs,
    MetricsError,
    MissingField,
    NotEligible,
    NotInVotingState,
    TallyMismatch,
    VetoWindowClosed,
)
from ..identity.registry import Scope, VerifiedParticipation
from ..metrics import (
    ApprovalDenominator,
    ImpactInputs,
    PassOutcome,
    VoteTally,
    impact_score,
    pass_decision,
    veto_decision,
)
from ..utils.file_ops import setup_logging
from .states import EventKind, GovEvent, GovState, VoteDirection, successors

logger = setup_logging(__name__)

REQUIRED_FIELDS = (
    "problem_statement",
    "proposed_action",
    "impact_scope",
    "stakeholders",
    "resources",
)


@dataclass(frozen=True)
class ProposalDraft:
    """What a proposer submits. All five text fields are required."""

    problem_statement: str
    proposed_action: str
    impact_scope: str
    stakeholders: str
    resources: str
    impact_inputs: Optional[ImpactInputs] = None
    archive_ref: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {name: getattr(self, name) for name in REQUIRED_FIELDS}
        data["impact_inputs"] = self.impact_inputs.to_dict() if self.impact_inputs else None
        data["archive_ref"] = self.archive_ref
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ProposalDraft":
        inputs = data.get("impact_inputs")
        try:
            impact = ImpactInputs.from_dict(inputs) if inputs is not None else None
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedImpactInputs(f"cannot read impact inputs: {e}") from e
        return cls(
            **{name: str(data.get(name) or "") for name in REQUIRED_FIELDS},
            impact_inputs=impact,
            archive_ref=data.get("archive_ref"),
        )


@dataclass(frozen=True)
class QuorumContext:
    """Everything a decision needs from outside the proposal record."""

    eligible: int
    quorum: float
    q_veto: float
    tau: int
    approval_denominator: ApprovalDenominator = ApprovalDenominator.ALL_CAST


@dataclass(frozen=True)
class Proposal:
    id: str
    draft: ProposalDraft
    state: GovState
    cycle: int = 0
    terminal: bool = False
    tally: VoteTally = field(default_factory=VoteTally)
    veto_count: int = 0
    deliberation_opened_at: Optional[int] = None
    vote_opened_at: Optional[int] = None
    vote_closed_at: Optional[int] = None
    veto_window_deadline: Optional[int] = None
    eligible: Optional[int] = None
    quorum: Optional[float] = None
    outcome: Optional[PassOutcome] = None
    vote_nullifiers: FrozenSet[str] = frozenset()
    veto_nullifiers: FrozenSet[str] = frozenset()

    @property
    def decision_id(self) -> str:
        """Identifier scoping nullifiers to this proposal cycle."""
        return f"{self.id}#{self.cycle}"

    @property
    def archive_ref(self) -> Optional[str]:
        return self.draft.archive_ref

    @property
    def problem_statement(self) -> str:
        return self.draft.problem_statement

    @property
    def proposed_action(self) -> str:
        return self.draft.proposed_action


AuditRecord = Dict[str, Any]


class AuditSink(Protocol):
    def __call__(self, record: AuditRecord) -> None: ...


class AuditTrail:
    """In-memory audit sink used when no ledger is attached."""

    def __init__(self) -> None:
        self.records: List[AuditRecord] = []

    def __call__(self, record: AuditRecord) -> None:
        self.records.append(record)

    def for_proposal(self, proposal_id: str) -> List[AuditRecord]:
        return [r for r in self.records if r["proposal_id"] == proposal_id]


CompliancePredicate = Callable[[Proposal], bool]


def always_compliant(proposal: Proposal) -> bool:
    return True


def check_draft(draft: ProposalDraft) -> None:
    """Structural acceptance checks for a draft.

    Raises:
        MissingField: Naming the first empty required field
        MalformedImpactInputs: If the impact inputs cannot be scored
    """
    for name in REQUIRED_FIELDS:
        value = getattr(draft, name)
        if not isinstance(value, str) or not value.strip():
            raise MissingField(f"required field '{name}' is empty", detail=name)
    if draft.impact_inputs is None:
        raise MalformedImpactInputs("impact inputs are missing")
    try:
        impact_score(draft.impact_inputs)
    except MetricsError as e:
        raise MalformedImpactInputs(f"impact inputs are invalid: {e}") from e


class GovernanceEngine:
    """Deterministic transition function with an attached audit sink.

    The engine holds no proposal state of its own; callers own the records
    and must serialize mutating calls for any single proposal.
    """

    def __init__(
        self,
        audit: Optional[AuditSink] = None,
        compliance: CompliancePredicate = always_compliant,
    ):
        """Initialize the engine.

        Args:
            audit: Sink receiving one record per successful operation
            compliance: Constitutional-compliance predicate used by validate()
        """
        self.audit: AuditSink = audit if audit is not None else AuditTrail()
        self.compliance = compliance
        self._next_id = 1

    def _new_id(self) -> str:
        proposal_id = f"P-{self._next_id:04d}"
        self._next_id += 1
        return proposal_id

    def _record(
        self,
        before: Proposal,
        after: Proposal,
        event: str,
        t: int,
        **counts: Any,
    ) -> None:
        record: AuditRecord = {
            "proposal_id": after.id,
            "cycle": after.cycle,
            "event": event,
            "from_state": before.state.value,
            "to_state": after.state.value,
            "terminal": after.terminal,
            "t": t,
        }
        record.update(counts)
        self.audit(record)
        if before.state is not after.state or before.terminal is not after.terminal:
            logger.info(
                f"{after.id} cycle {after.cycle}: {before.state.value} -> "
                f"{after.state.value}{' (terminal)' if after.terminal else ''} on {event}"
            )

    def submit(
        self, draft: ProposalDraft, t: int, proposal_id: Optional[str] = None
    ) -> Proposal:
        """Accept a draft; the proposal opens deliberation immediately.

        Raises:
            MissingField: If a required field is empty
            MalformedImpactInputs: If the impact inputs cannot be scored
        """
        check_draft(draft)
        pid = proposal_id or self._new_id()
        proposed = Proposal(id=pid, draft=draft, state=GovState.PROPOSED)
        opened = replace(
            proposed, state=GovState.DELIBERATING, deliberation_opened_at=t
        )
        self._record(
            proposed,
            opened,
            EventKind.SUBMISSION_ACCEPTED.value,
            t,
            draft=draft.to_dict(),
        )
        return opened

    def step(self, p: Proposal, e: GovEvent, ctx: Optional[QuorumContext] = None) -> Proposal:
        """Apply one transition-table row.

        Raises:
            IllegalTransition: If (state, event) is not a row of the table, the
                proposal is terminal, or the event's preconditions do not hold
        """
        kind = EventKind(e.kind)
        targets = successors(p.state, kind)
        if p.terminal or not targets:
            raise IllegalTransition(
                f"no transition from {p.state.value}"
                f"{' (terminal)' if p.terminal else ''} on {kind.value}",
                detail=(p.id, p.state.value, kind.value),
            )
        handler = getattr(self, f"_on_{kind.name.lower()}")
        after, counts = handler(p, e, ctx)
        assert after.state in targets
        self._record(p, after, kind.value, e.t, **counts)
        return after

    # Per-row handlers. Each returns the new record and audit counts.

    def _on_submission_accepted(self, p, e, ctx):
        draft = p.draft
        if "draft" in e.payload:
            draft = ProposalDraft.from_dict(e.payload["draft"])
        check_draft(draft)
        return (
            replace(p, draft=draft, state=GovState.DELIBERATING, deliberation_opened_at=e.t),
            {"draft": draft.to_dict()},
        )

    def _on_deliberation_expired(self, p, e, ctx):
        return replace(p, state=GovState.VALIDATING), {}

    def _on_proposer_withdrawal(self, p, e, ctx):
        return replace(p, state=GovState.REJECTED, terminal=True), {}

    def _on_validation_passed(self, p, e, ctx):
        ctx = _require_ctx(p, ctx, EventKind.VALIDATION_PASSED)
        opened = replace(
            p,
            state=GovState.VOTING,
            vote_opened_at=e.t,
            eligible=ctx.eligible,
            quorum=ctx.quorum,
        )
        return opened, {"eligible": ctx.eligible, "quorum": ctx.quorum}

    def _on_validation_failed(self, p, e, ctx):
        reason = str(e.payload.get("reason", "constitutional compliance failed"))
        return replace(p, state=GovState.REJECTED, terminal=True), {"reason": reason}

    def _on_vote_closed(self, p, e, ctx):
        ctx = _require_ctx(p, ctx, EventKind.VOTE_CLOSED)
        tally = p.tally
        if "tally" in e.payload:
            supplied = VoteTally.from_dict(e.payload["tally"])
            if p.tally.total == 0:
                tally = supplied
            elif supplied != p.tally:
                raise TallyMismatch(
                    "supplied tally disagrees with recorded votes",
                    detail=(supplied.to_dict(), p.tally.to_dict()),
                )
        eligible = p.eligible or ctx.eligible
        if tally.total > eligible:
            raise TallyMismatch(
                "more ballots than eligible citizens", detail=(tally.to_dict(), eligible)
            )
        quorum = p.quorum if p.quorum is not None else ctx.quorum
        outcome = pass_decision(tally, eligible, quorum, ctx.approval_denominator)
        closed = replace(
            p,
            tally=tally,
            eligible=eligible,
            quorum=quorum,
            outcome=outcome,
            vote_closed_at=e.t,
        )
        if outcome.passed:
            closed = replace(
                closed, state=GovState.EXECUTED, veto_window_deadline=e.t + ctx.tau
            )
        else:
            closed = replace(closed, state=GovState.REJECTED, terminal=True)
        return closed, {
            "tally": tally.to_dict(),
            "eligible": eligible,
            "quorum": quorum,
            "outcome": outcome.value,
            "approval_denominator": ApprovalDenominator(ctx.approval_denominator).value,
            "q_veto": ctx.q_veto,
            "veto_window_deadline": closed.veto_window_deadline,
        }

    def _on_veto_threshold_reached(self, p, e, ctx):
        ctx = _require_ctx(p, ctx, EventKind.VETO_THRESHOLD_REACHED)
        if p.veto_window_deadline is not None and e.t > p.veto_window_deadline:
            raise VetoWindowClosed("veto window already closed", detail=p.id)
        count = int(e.payload.get("veto_count", p.veto_count))
        eligible = p.eligible or ctx.eligible
        if not 0 <= count <= eligible:
            raise TallyMismatch("veto count outside [0, P]", detail=(p.id, count, eligible))
        if not veto_decision(count, eligible, ctx.q_veto):
            raise IllegalTransition(
                "veto threshold not reached",
                detail=(p.id, count, eligible, ctx.q_veto),
            )
        return (
            replace(p, state=GovState.VETOED, veto_count=count),
            {"veto_count": count, "eligible": eligible, "q_veto": ctx.q_veto},
        )

    def _on_veto_window_expired(self, p, e, ctx):
        if p.veto_window_deadline is not None and e.t < p.veto_window_deadline:
            raise IllegalTransition(
                "veto window still open", detail=(p.id, e.t, p.veto_window_deadline)
            )
        return replace(p, terminal=True), {"veto_count": p.veto_count}

    def _on_revised_resubmission(self, p, e, ctx):
        draft = p.draft
        if "draft" in e.payload:
            draft = ProposalDraft.from_dict(e.payload["draft"])
        fresh = Proposal(
            id=p.id, draft=draft, state=GovState.PROPOSED, cycle=p.cycle + 1
        )
        return fresh, {"previous_cycle": p.cycle, "draft": draft.to_dict()}

    # Operations outside the table rows.

    def validate(self, p: Proposal, t: int, ctx: QuorumContext) -> Proposal:
        """Run the compliance predicate and apply the matching validation row."""
        if self.compliance(p):
            return self.step(p, GovEvent(EventKind.VALIDATION_PASSED, t), ctx)
        return self.step(p, GovEvent(EventKind.VALIDATION_FAILED, t), ctx)

    def resubmit(self, p: Proposal, draft: ProposalDraft, t: int) -> Proposal:
        """Revise a vetoed proposal and, if the draft is acceptable, reopen it.

        A draft failing acceptance leaves the proposal in Proposed.
        """
        proposed = self.step(
            p, GovEvent(EventKind.REVISED_RESUBMISSION, t, {"draft": draft.to_dict()})
        )
        try:
            check_draft(draft)
        except (MissingField, MalformedImpactInputs) as e:
            logger.warning(f"{p.id} resubmission not accepted: {e}")
            return proposed
        return self.step(proposed, GovEvent(EventKind.SUBMISSION_ACCEPTED, t))

    def cast_vote(
        self,
        p: Proposal,
        participation: VerifiedParticipation,
        direction: VoteDirection,
        t: int,
    ) -> Proposal:
        """Count one verified vote; only the nullifier is audited.

        Raises:
            NotInVotingState: If the proposal is not open for voting
            DuplicateNullifier: If the nullifier was already counted
        """
        if p.state is not GovState.VOTING:
            raise NotInVotingState(f"{p.id} is {p.state.value}", detail=p.id)
        _check_scope(p, participation, Scope.VOTE)
        if participation.nullifier in p.vote_nullifiers:
            raise DuplicateNullifier("vote nullifier already consumed", detail=p.id)
        direction = VoteDirection(direction)
        tally = VoteTally(
            votes_for=p.tally.votes_for + (direction is VoteDirection.FOR),
            votes_against=p.tally.votes_against + (direction is VoteDirection.AGAINST),
            votes_blank=p.tally.votes_blank + (direction is VoteDirection.BLANK),
        )
        after = replace(
            p, tally=tally, vote_nullifiers=p.vote_nullifiers | {participation.nullifier}
        )
        # direction is folded into the tally before the audit write
        self._record(
            p, after, "VoteCast", t, nullifier=participation.nullifier, votes_cast=tally.total
        )
        logger.debug(f"{p.id}: vote counted, V={tally.total}")
        return after

    def register_veto(
        self,
        p: Proposal,
        participation: VerifiedParticipation,
        t: int,
        ctx: QuorumContext,
    ) -> Proposal:
        """Register one veto; crossing the threshold moves the proposal to Vetoed.

        Raises:
            VetoWindowClosed: If the proposal is not inside an open veto window
            DuplicateNullifier: If the veto nullifier was already counted
        """
        if (
            p.state is not GovState.EXECUTED
            or p.terminal
            or p.veto_window_deadline is None
            or t > p.veto_window_deadline
        ):
            raise VetoWindowClosed(f"{p.id} is not accepting vetoes", detail=p.id)
        _check_scope(p, participation, Scope.VETO)
        if participation.nullifier in p.veto_nullifiers:
            raise DuplicateNullifier("veto nullifier already consumed", detail=p.id)
        count = p.veto_count + 1
        after = replace(
            p, veto_count=count, veto_nullifiers=p.veto_nullifiers | {participation.nullifier}
        )
        eligible = p.eligible or ctx.eligible
        reached = veto_decision(count, eligible, ctx.q_veto)
        if reached:
            after = replace(after, state=GovState.VETOED)
        self._record(
            p,
            after,
            "VetoRegistered",
            t,
            nullifier=participation.nullifier,
            veto_count=count,
            eligible=eligible,
            q_veto=ctx.q_veto,
            threshold_reached=reached,
        )
        return after


def _require_ctx(p: Proposal, ctx: Optional[QuorumContext], kind: EventKind) -> QuorumContext:
    if ctx is None:
        raise IllegalTransition(f"{kind.value} needs a quorum context", detail=p.id)
    return ctx


def _check_scope(p: Proposal, participation: VerifiedParticipation, scope: Scope) -> None:
    if participation.decision_id != p.decision_id or participation.scope is not scope:
        raise NotEligible(
            "participation is scoped to another decision",
            detail=(participation.decision_id, participation.scope.value),
        )
