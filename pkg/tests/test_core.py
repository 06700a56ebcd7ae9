"""Tests for the governance state machine."""

from dataclasses import replace

import pytest

from conftest import make_draft
from ppg.core import (
    TRANSITIONS,
    AuditTrail,
    EventKind,
    GovernanceEngine,
    GovEvent,
    GovState,
    Proposal,
    ProposalDraft,
    QuorumContext,
    VoteDirection,
    table_rows,
)
from ppg.errors import (
    DuplicateNullifier,
    IllegalTransition,
    MalformedImpactInputs,
    MissingField,
    NotEligible,
    NotInVotingState,
    TallyMismatch,
    VetoWindowClosed,
)
from ppg.identity import Scope
from ppg.metrics import PassOutcome, VoteTally

TAU = 1000
CTX = QuorumContext(eligible=10, quorum=0.4, q_veto=0.3, tau=TAU)


@pytest.fixture
def engine():
    return GovernanceEngine()


def voting(engine, draft, t=0):
    p = engine.submit(draft, t)
    p = engine.step(p, GovEvent(EventKind.DELIBERATION_EXPIRED, t + 1))
    return engine.step(p, GovEvent(EventKind.VALIDATION_PASSED, t + 2), CTX)


def closed(engine, draft, tally, t=10):
    p = voting(engine, draft)
    return engine.step(p, GovEvent(EventKind.VOTE_CLOSED, t, {"tally": tally.to_dict()}), CTX)


class TestTransitionTable:
    def test_published_table_has_eleven_rows(self):
        assert table_rows() == 11
        assert len(TRANSITIONS) == 9

    @pytest.mark.parametrize("state", list(GovState))
    @pytest.mark.parametrize("event", list(EventKind))
    def test_pairs_outside_table_are_illegal(self, engine, draft, state, event):
        if (state, event) in TRANSITIONS:
            pytest.skip("legal pair")
        p = Proposal(id="P-9999", draft=draft, state=state)
        with pytest.raises(IllegalTransition):
            engine.step(p, GovEvent(event, 0), CTX)

    @pytest.mark.parametrize("event", list(EventKind))
    def test_terminal_proposals_accept_nothing(self, engine, draft, event):
        p = Proposal(id="P-0001", draft=draft, state=GovState.EXECUTED, terminal=True)
        with pytest.raises(IllegalTransition):
            engine.step(p, GovEvent(event, 0), CTX)


class TestSubmission:
    def test_submit_opens_deliberation(self, engine, draft):
        p = engine.submit(draft, 5)
        assert p.state is GovState.DELIBERATING
        assert p.id == "P-0001"
        assert p.cycle == 0
        assert p.deliberation_opened_at == 5

    def test_ids_are_sequential(self, engine, draft):
        assert engine.submit(draft, 0).id == "P-0001"
        assert engine.submit(draft, 0).id == "P-0002"

    def test_empty_field_rejected(self, engine):
        with pytest.raises(MissingField) as exc:
            engine.submit(make_draft(stakeholders="  "), 0)
        assert exc.value.detail == "stakeholders"

    def test_missing_impact_inputs_rejected(self, engine, draft):
        with pytest.raises(MalformedImpactInputs):
            engine.submit(replace(draft, impact_inputs=None), 0)

    def test_draft_from_dict_with_bad_inputs(self):
        with pytest.raises(MalformedImpactInputs):
            ProposalDraft.from_dict({"problem_statement": "x", "impact_inputs": {"budget_baseline": 1}})

    def test_withdrawal_rejects(self, engine, draft):
        p = engine.submit(draft, 0)
        p = engine.step(p, GovEvent(EventKind.PROPOSER_WITHDRAWAL, 3))
        assert p.state is GovState.REJECTED
        assert p.terminal

    def test_validation_failed_is_terminal(self, engine, draft):
        p = engine.submit(draft, 0)
        p = engine.step(p, GovEvent(EventKind.DELIBERATION_EXPIRED, 1))
        p = engine.step(p, GovEvent(EventKind.VALIDATION_FAILED, 2, {"reason": "ultra vires"}))
        assert p.state is GovState.REJECTED and p.terminal
        assert engine.audit.records[-1]["reason"] == "ultra vires"

    def test_validation_needs_context(self, engine, draft):
        p = engine.submit(draft, 0)
        p = engine.step(p, GovEvent(EventKind.DELIBERATION_EXPIRED, 1))
        with pytest.raises(IllegalTransition):
            engine.step(p, GovEvent(EventKind.VALIDATION_PASSED, 2))

    def test_validate_uses_compliance_predicate(self, draft):
        engine = GovernanceEngine(compliance=lambda p: False)
        p = engine.submit(draft, 0)
        p = engine.step(p, GovEvent(EventKind.DELIBERATION_EXPIRED, 1))
        assert engine.validate(p, 2, CTX).state is GovState.REJECTED


class TestVoting:
    def test_validation_freezes_population_and_quorum(self, engine, draft):
        p = voting(engine, draft)
        assert p.state is GovState.VOTING
        assert p.eligible == 10
        assert p.quorum == 0.4

    def test_four_of_ten_with_three_for_passes(self, engine, draft):
        p = closed(engine, draft, VoteTally(3, 1, 0))
        assert p.state is GovState.EXECUTED
        assert not p.terminal
        assert p.outcome is PassOutcome.PASS
        assert p.veto_window_deadline == 10 + TAU

    def test_below_quorum_rejects(self, engine, draft):
        p = closed(engine, draft, VoteTally(3, 0, 0))
        assert p.state is GovState.REJECTED and p.terminal
        assert p.outcome is PassOutcome.FAIL_QUORUM

    def test_tie_fails_approval(self, engine, draft):
        p = closed(engine, draft, VoteTally(2, 2, 0))
        assert p.outcome is PassOutcome.FAIL_APPROVAL

    def test_blank_votes_count_toward_quorum_and_denominator(self, engine, draft):
        p = closed(engine, draft, VoteTally(2, 0, 2))
        assert p.outcome is PassOutcome.FAIL_APPROVAL

    def test_cast_vote_requires_voting_state(self, engine, draft, registry):
        p = engine.submit(draft, 0)
        cred = registry.register(b"ok")
        registry.snapshot(p.decision_id)
        participation = registry.prove_participation(cred, p.decision_id, Scope.VOTE)
        with pytest.raises(NotInVotingState):
            engine.cast_vote(p, participation, VoteDirection.FOR, 1)

    def test_votes_fold_into_tally(self, engine, draft, registry):
        creds = [registry.register(b"ok") for _ in range(10)]
        p = voting(engine, draft)
        registry.snapshot(p.decision_id)
        for cred, direction in zip(creds, ["For", "For", "Against", "Blank"]):
            participation = registry.prove_participation(cred, p.decision_id, Scope.VOTE)
            p = engine.cast_vote(p, participation, VoteDirection(direction), 5)
        assert p.tally == VoteTally(2, 1, 1)
        p = engine.step(p, GovEvent(EventKind.VOTE_CLOSED, 9), CTX)
        assert p.outcome is PassOutcome.FAIL_APPROVAL

    def test_vote_audit_records_no_direction(self, engine, draft, registry):
        cred = registry.register(b"ok")
        p = voting(engine, draft)
        registry.snapshot(p.decision_id)
        participation = registry.prove_participation(cred, p.decision_id, Scope.VOTE)
        engine.cast_vote(p, participation, VoteDirection.AGAINST, 5)
        record = engine.audit.records[-1]
        assert record["event"] == "VoteCast"
        assert record["nullifier"] == participation.nullifier
        assert "Against" not in str(record) and "direction" not in record

    def test_reused_participation_rejected(self, engine, draft, registry):
        cred = registry.register(b"ok")
        p = voting(engine, draft)
        registry.snapshot(p.decision_id)
        participation = registry.prove_participation(cred, p.decision_id, Scope.VOTE)
        p = engine.cast_vote(p, participation, VoteDirection.FOR, 5)
        with pytest.raises(DuplicateNullifier):
            engine.cast_vote(p, participation, VoteDirection.FOR, 6)

    def test_participation_for_other_decision_rejected(self, engine, draft, registry):
        cred = registry.register(b"ok")
        p = voting(engine, draft)
        registry.snapshot("P-0042#0")
        participation = registry.prove_participation(cred, "P-0042#0", Scope.VOTE)
        with pytest.raises(NotEligible):
            engine.cast_vote(p, participation, VoteDirection.FOR, 5)

    def test_supplied_tally_must_match_counted_votes(self, engine, draft, registry):
        cred = registry.register(b"ok")
        p = voting(engine, draft)
        registry.snapshot(p.decision_id)
        p = engine.cast_vote(
            p, registry.prove_participation(cred, p.decision_id, Scope.VOTE), VoteDirection.FOR, 5
        )
        with pytest.raises(TallyMismatch):
            engine.step(p, GovEvent(EventKind.VOTE_CLOSED, 9, {"tally": {"for": 7}}), CTX)

    def test_supplied_tally_above_electorate_rejected(self, engine, draft):
        p = voting(engine, draft)
        before = len(engine.audit.records)
        with pytest.raises(TallyMismatch):
            engine.step(p, GovEvent(EventKind.VOTE_CLOSED, 9, {"tally": {"for": 50}}), CTX)
        assert len(engine.audit.records) == before


class TestVetoWindow:
    def test_veto_threshold_moves_to_vetoed(self, engine, draft):
        p = closed(engine, draft, VoteTally(4, 0, 0))
        p = engine.step(p, GovEvent(EventKind.VETO_THRESHOLD_REACHED, 20, {"veto_count": 3}), CTX)
        assert p.state is GovState.VETOED
        assert not p.terminal

    def test_threshold_not_met_is_illegal(self, engine, draft):
        p = closed(engine, draft, VoteTally(4, 0, 0))
        with pytest.raises(IllegalTransition):
            engine.step(p, GovEvent(EventKind.VETO_THRESHOLD_REACHED, 20, {"veto_count": 2}), CTX)

    def test_veto_count_above_electorate_rejected(self, engine, draft):
        p = closed(engine, draft, VoteTally(4, 0, 0))
        with pytest.raises(TallyMismatch):
            engine.step(p, GovEvent(EventKind.VETO_THRESHOLD_REACHED, 20, {"veto_count": 11}), CTX)
        assert p.state is GovState.EXECUTED

    def test_threshold_after_deadline_rejected(self, engine, draft):
        p = closed(engine, draft, VoteTally(4, 0, 0))
        late = p.veto_window_deadline + 1
        with pytest.raises(VetoWindowClosed):
            engine.step(p, GovEvent(EventKind.VETO_THRESHOLD_REACHED, late, {"veto_count": 5}), CTX)

    def test_window_expiry_waits_for_deadline(self, engine, draft):
        p = closed(engine, draft, VoteTally(4, 0, 0))
        with pytest.raises(IllegalTransition):
            engine.step(p, GovEvent(EventKind.VETO_WINDOW_EXPIRED, p.veto_window_deadline - 1))
        p = engine.step(p, GovEvent(EventKind.VETO_WINDOW_EXPIRED, p.veto_window_deadline))
        assert p.state is GovState.EXECUTED and p.terminal

    def test_registered_vetoes_trigger_vetoed(self, engine, draft, registry):
        creds = [registry.register(b"ok") for _ in range(10)]
        p = closed(engine, draft, VoteTally(4, 0, 0))
        registry.snapshot(p.decision_id)
        for cred in creds[:3]:
            participation = registry.prove_participation(cred, p.decision_id, Scope.VETO)
            p = engine.register_veto(p, participation, 20, CTX)
        assert p.state is GovState.VETOED
        assert p.veto_count == 3
        assert engine.audit.records[-1]["threshold_reached"] is True

    def test_veto_outside_window_rejected(self, engine, draft, registry):
        cred = registry.register(b"ok")
        p = voting(engine, draft)
        registry.snapshot(p.decision_id)
        participation = registry.prove_participation(cred, p.decision_id, Scope.VETO)
        with pytest.raises(VetoWindowClosed):
            engine.register_veto(p, participation, 5, CTX)

    def test_resubmission_starts_new_cycle(self, engine, draft):
        p = closed(engine, draft, VoteTally(4, 0, 0))
        p = engine.step(p, GovEvent(EventKind.VETO_THRESHOLD_REACHED, 20, {"veto_count": 3}), CTX)
        revised = make_draft(proposed_action="Resurface Elm Street with a cycle lane")
        p = engine.resubmit(p, revised, 30)
        assert p.state is GovState.DELIBERATING
        assert p.cycle == 1
        assert p.decision_id == "P-0001#1"
        assert p.tally == VoteTally()
        assert p.draft.proposed_action.endswith("cycle lane")

    def test_unacceptable_resubmission_stays_proposed(self, engine, draft):
        p = closed(engine, draft, VoteTally(4, 0, 0))
        p = engine.step(p, GovEvent(EventKind.VETO_THRESHOLD_REACHED, 20, {"veto_count": 3}), CTX)
        p = engine.resubmit(p, make_draft(resources=""), 30)
        assert p.state is GovState.PROPOSED
        assert p.cycle == 1


class TestAuditTrail:
    def test_one_record_per_operation(self, draft):
        trail = AuditTrail()
        engine = GovernanceEngine(audit=trail)
        closed(engine, draft, VoteTally(4, 0, 0))
        events = [r["event"] for r in trail.records]
        assert events == ["SubmissionAccepted", "DeliberationExpired", "ValidationPassed", "VoteClosed"]
        close = trail.records[-1]
        assert close["from_state"] == "Voting" and close["to_state"] == "Executed"
        assert close["tally"] == {"for": 4, "against": 0, "blank": 0}
        assert close["eligible"] == 10
        assert trail.for_proposal("P-0001") == trail.records
