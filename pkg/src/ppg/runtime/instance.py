"""
Governance instance: the composition root joining the state machine, the
metrics, the identity layer and the ledger.

Every proposal state change reaches the ledger as a GovernanceEvent entry
because the ledger is the engine's audit sink. Vote directions are folded
into the tally before anything is written; only nullifiers are public.
"""

import threading
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional

from ..config import PPGSettings, create_config
from ..core import (
    EventKind,
    GovernanceEngine,
    GovEvent,
    GovState,
    Proposal,
    ProposalDraft,
    QuorumContext,
    VoteDirection,
)
from ..errors import IllegalTransition, NotEligible, NotInVotingState, NullifierAlreadyConsumed
from ..identity import Credential, EligibilityRegistry, Scope
from ..ledger import EntryKind, FinancialTx, Ledger, RedactedTx
from ..metrics import (
    DelibArchive,
    approval_fraction,
    delib_quality,
    dynamic_quorum,
    impact_score,
    legitimacy,
    participation_rate,
)
from ..utils.canonical import canonical_hash
from ..utils.file_ops import setup_logging

logger = setup_logging(__name__)


@dataclass(frozen=True)
class DecisionRecord:
    """One closed vote: the inputs and result of its legitimacy score."""

    proposal_id: str
    cycle: int
    R: float
    approval: float
    delib: float
    legitimacy: float
    outcome: str
    closed_at: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "proposal": self.proposal_id,
            "cycle": self.cycle,
            "R": self.R,
            "approval": self.approval,
            "delib": self.delib,
            "legitimacy": self.legitimacy,
            "outcome": self.outcome,
        }


def proposal_state(p: Proposal) -> Dict[str, Any]:
    """Publicly reconstructible view of a proposal."""
    return {
        "id": p.id,
        "state": p.state.value,
        "cycle": p.cycle,
        "terminal": p.terminal,
        "tally": p.tally.to_dict(),
        "veto_count": p.veto_count,
        "outcome": p.outcome.value if p.outcome else None,
        "eligible": p.eligible,
        "quorum": p.quorum,
        "veto_window_deadline": p.veto_window_deadline,
    }


class GovernanceInstance:
    """A runnable governance instance.

    One instance is one writer: all mutating calls go through a re-entrant
    lock, so concurrent callers are serialized per instance.
    """

    def __init__(
        self,
        settings: PPGSettings,
        registry: EligibilityRegistry,
        ledger: Ledger,
        engine: Optional[GovernanceEngine] = None,
    ):
        """Initialize the instance around existing components.

        Args:
            settings: Governance parameters
            registry: Eligibility registry holding the citizen commitments
            ledger: Public ledger receiving every audit record
            engine: State machine; a default engine writing to the ledger is built if omitted
        """
        self.settings = settings
        self.registry = registry
        self.ledger = ledger
        self.engine = engine or GovernanceEngine(audit=self._audit)
        self.proposals: Dict[str, Proposal] = {}
        self.contexts: Dict[str, QuorumContext] = {}
        self.archives: Dict[str, DelibArchive] = {}
        self.decisions: List[DecisionRecord] = []
        self._credentials: List[Credential] = []
        self._lock = threading.RLock()

    def _audit(self, record: Dict[str, Any]) -> None:
        body = dict(record)
        if record["event"] == EventKind.VALIDATION_PASSED.value:
            snapshot = self.registry.get_snapshot(f"{record['proposal_id']}#{record['cycle']}")
            if snapshot is not None:
                body["registry_root"] = snapshot.registry_root
        self.ledger.append(body, EntryKind.GOVERNANCE_EVENT, record["t"])

    def write_header(self, timestamp: int = 0) -> None:
        """Genesis header: signature scheme, public key and config hash."""
        self.ledger.append_header(
            timestamp,
            config_hash=canonical_hash(self.settings.to_dict()),
            environment=self.settings.environment,
        )

    # Identity

    def register_citizens(self, count: int, t: int, attestation: bytes = b"attested") -> int:
        with self._lock:
            for _ in range(count):
                self._credentials.append(self.registry.register(attestation, now=t))
        logger.info(f"Registered {count} citizens at t={t}; registry size {len(self.registry)}")
        return count

    def sweep(self, t: int) -> int:
        with self._lock:
            return self.registry.revalidation_sweep(t)

    def _participations(self, decision_id: str, scope: Scope, count: int):
        """Yield fresh participations from held credentials, in registration order."""
        produced = 0
        for cred in self._credentials:
            if produced >= count:
                return
            try:
                yield self.registry.prove_participation(cred, decision_id, scope)
            except (NotEligible, NullifierAlreadyConsumed):
                continue
            produced += 1

    # Proposal lifecycle

    def get(self, proposal_id: str) -> Proposal:
        try:
            return self.proposals[proposal_id]
        except KeyError:
            raise IllegalTransition(f"unknown proposal {proposal_id}", detail=proposal_id) from None

    def submit(self, draft: ProposalDraft, t: int, proposal_id: Optional[str] = None) -> Proposal:
        with self._lock:
            if proposal_id is not None and proposal_id in self.proposals:
                raise IllegalTransition(f"proposal {proposal_id} already exists", detail=proposal_id)
            p = self.engine.submit(draft, t, proposal_id)
            self.proposals[p.id] = p
            return p

    def build_context(self, p: Proposal, t: int) -> QuorumContext:
        """Freeze P and compute Q(i) for the proposal's current cycle."""
        sigma = impact_score(p.draft.impact_inputs)
        quorum = dynamic_quorum(self.settings.quorum_params(), sigma)
        snapshot = self.registry.snapshot(p.decision_id, now=t)
        ctx = QuorumContext(
            eligible=snapshot.eligible,
            quorum=quorum,
            q_veto=self.settings.q_veto,
            tau=self.settings.tau_seconds,
            approval_denominator=self.settings.denominator(),
        )
        self.contexts[p.decision_id] = ctx
        return ctx

    def context_for(self, p: Proposal) -> QuorumContext:
        ctx = self.contexts.get(p.decision_id)
        if ctx is None:
            raise IllegalTransition(f"{p.id} has no eligibility snapshot", detail=p.decision_id)
        return ctx

    def apply_event(self, proposal_id: str, kind: EventKind, t: int, payload: Optional[Mapping[str, Any]] = None) -> Proposal:
        """Apply one transition-table event to a proposal."""
        with self._lock:
            p = self.get(proposal_id)
            payload = dict(payload or {})
            kind = EventKind(kind)
            if kind is EventKind.REVISED_RESUBMISSION:
                draft = ProposalDraft.from_dict(payload["draft"]) if "draft" in payload else p.draft
                after = self.engine.resubmit(p, draft, t)
            else:
                ctx: Optional[QuorumContext] = None
                if kind is EventKind.VALIDATION_PASSED:
                    if p.state is not GovState.VALIDATING or p.terminal:
                        # let the engine report the illegal pair before a snapshot is taken
                        self.engine.step(p, GovEvent(kind, t, payload))
                    ctx = self.build_context(p, t)
                elif kind in (EventKind.VOTE_CLOSED, EventKind.VETO_THRESHOLD_REACHED):
                    ctx = self.contexts.get(p.decision_id)
                after = self.engine.step(p, GovEvent(kind, t, payload), ctx)
                if kind is EventKind.VOTE_CLOSED:
                    self._record_decision(after, t)
            self.proposals[proposal_id] = after
            return after

    def validate(self, proposal_id: str, t: int) -> Proposal:
        """Run the compliance predicate; a pass freezes the electorate."""
        with self._lock:
            p = self.get(proposal_id)
            if self.engine.compliance(p):
                return self.apply_event(proposal_id, EventKind.VALIDATION_PASSED, t)
            return self.apply_event(
                proposal_id, EventKind.VALIDATION_FAILED, t, {"reason": "constitutional compliance failed"}
            )

    def cast_votes(
        self, proposal_id: str, t: int, votes_for: int = 0, votes_against: int = 0, votes_blank: int = 0
    ) -> Proposal:
        """Cast votes from the next unused eligible credentials."""
        with self._lock:
            p = self.get(proposal_id)
            if p.state is not GovState.VOTING:
                raise NotInVotingState(f"{p.id} is {p.state.value}", detail=p.id)
            plan = (
                [VoteDirection.FOR] * votes_for
                + [VoteDirection.AGAINST] * votes_against
                + [VoteDirection.BLANK] * votes_blank
            )
            participations = list(self._participations(p.decision_id, Scope.VOTE, len(plan)))
            if len(participations) < len(plan):
                raise NotEligible(
                    f"only {len(participations)} unused eligible credentials for {len(plan)} votes",
                    detail=p.decision_id,
                )
            for participation, direction in zip(participations, plan):
                p = self.engine.cast_vote(p, participation, direction, t)
            self.proposals[proposal_id] = p
            return p

    def cast_vote(self, proposal_id: str, voter: int, direction: VoteDirection, t: int) -> Proposal:
        """Cast one vote with the credential at position ``voter``."""
        with self._lock:
            p = self.get(proposal_id)
            participation = self.registry.prove_participation(
                self._credentials[voter], p.decision_id, Scope.VOTE
            )
            p = self.engine.cast_vote(p, participation, VoteDirection(direction), t)
            self.proposals[proposal_id] = p
            return p

    def register_vetoes(self, proposal_id: str, t: int, count: int) -> Proposal:
        """Register vetoes from unused credentials, stopping once Vetoed."""
        with self._lock:
            p = self.get(proposal_id)
            ctx = self.context_for(p)
            for participation in self._participations(p.decision_id, Scope.VETO, count):
                p = self.engine.register_veto(p, participation, t, ctx)
                if p.state is GovState.VETOED:
                    break
            self.proposals[proposal_id] = p
            return p

    def register_veto(self, proposal_id: str, voter: int, t: int) -> Proposal:
        with self._lock:
            p = self.get(proposal_id)
            ctx = self.context_for(p)
            participation = self.registry.prove_participation(
                self._credentials[voter], p.decision_id, Scope.VETO
            )
            p = self.engine.register_veto(p, participation, t, ctx)
            self.proposals[proposal_id] = p
            return p

    def attach_archive(self, archive_ref: str, archive: DelibArchive) -> None:
        self.archives[archive_ref] = archive

    def delib_for(self, p: Proposal) -> float:
        archive = self.archives.get(p.archive_ref or "", DelibArchive())
        return delib_quality(
            archive, self.settings.legitimacy_weights(), self.settings.vacuous_coverage
        )

    def _record_decision(self, p: Proposal, t: int) -> None:
        ctx = self.context_for(p)
        R = participation_rate(p.tally, p.eligible or ctx.eligible)
        approval = approval_fraction(p.tally, ctx.approval_denominator)
        delib = self.delib_for(p)
        record = DecisionRecord(
            proposal_id=p.id,
            cycle=p.cycle,
            R=R,
            approval=approval,
            delib=delib,
            legitimacy=legitimacy(R, approval, delib, self.settings.legitimacy_weights()),
            outcome=p.outcome.value if p.outcome else "",
            closed_at=t,
        )
        self.decisions.append(record)

    # Finance

    def record_financial(self, tx: FinancialTx, t: int, **context: Any):
        with self._lock:
            return self.ledger.append_financial(tx, t, **context)

    def record_redacted(self, tx: RedactedTx, t: int, **context: Any):
        with self._lock:
            return self.ledger.append_redacted(tx, t, **context)

    def record_correction(self, original_index: int, body: Mapping[str, Any], t: int):
        with self._lock:
            return self.ledger.append_correction(original_index, body, t)

    def states(self) -> Dict[str, Dict[str, Any]]:
        return {pid: proposal_state(p) for pid, p in sorted(self.proposals.items())}


def create_instance(
    settings: Optional[PPGSettings] = None,
    ledger_path: Optional[str] = None,
    write_header: bool = True,
) -> GovernanceInstance:
    """Factory function to create a governance instance for a settings profile.

    Args:
        settings: Settings profile; the sandbox profile is used if omitted
        ledger_path: File the ledger appends to; in memory if omitted
        write_header: Write the genesis header entry

    Returns:
        A GovernanceInstance with a fresh registry and ledger
    """
    settings = settings or create_config("sandbox")
    registry = EligibilityRegistry(
        secret_source=settings.secret_source(),
        credential_lifetime=settings.credential_lifetime_seconds,
    )
    ledger = Ledger(
        key=settings.signing_key(),
        path=ledger_path,
        publication_bound=settings.publication_bound_seconds,
    )
    instance = GovernanceInstance(settings, registry, ledger)
    if write_header:
        instance.write_header()
    logger.info(f"Created {settings.environment} governance instance")
    return instance

