"""Tests for scenario replay, legitimacy reporting and ledger reconstruction."""

import csv
import json
from pathlib import Path

import pytest

from ppg.config import create_config
from ppg.errors import IllegalTransition, NoDecisions, ParseError, TallyMismatch
from ppg.ledger import verify_chain, verify_file
from ppg.runtime import (
    REPORT_FIELDS,
    apply_action,
    legitimacy_report,
    parse_scenario,
    random_scenario,
    reconstruct_from_ledger,
    reconstructed_states,
    replay,
    scenario_lines,
    state_mismatches,
)

LIFECYCLE = Path(__file__).resolve().parents[1] / "config" / "scenarios" / "lifecycle.jsonl"

DRAFT = {
    "problem_statement": "Potholes",
    "proposed_action": "Resurface Elm Road",
    "impact_scope": "Elm Road",
    "stakeholders": "Drivers",
    "resources": "20000",
    "impact_inputs": {
        "financial_magnitude": 20000,
        "budget_baseline": 100000,
        "population_affected": 10,
        "eligible_population": 100,
        "reversibility": "Low",
    },
}


def line(t, event, proposal=None, **payload):
    return json.dumps({"t": t, "event": event, "proposal": proposal, "payload": payload})


@pytest.fixture(scope="module")
def lifecycle():
    return replay(str(LIFECYCLE))


class TestLifecycle:
    def test_final_states(self, lifecycle):
        states = lifecycle.states()
        assert states["P-0001"]["state"] == "Executed"
        assert states["P-0001"]["terminal"] is True
        assert states["P-0001"]["tally"] == {"for": 21, "against": 17, "blank": 2}
        assert states["P-0001"]["veto_count"] == 5
        assert states["P-0002"]["state"] == "Rejected"

    def test_ledger_contents(self, lifecycle):
        assert len(lifecycle.ledger) == 54
        assert verify_chain(lifecycle.ledger.to_bytes()).ok
        stats = lifecycle.ledger.stats()
        assert stats["per_kind"]["FinancialTx"] == 1
        assert stats["per_kind"]["GovernanceEvent"] == 52

    def test_replay_is_byte_identical(self, lifecycle, tmp_path):
        path = tmp_path / "ledger.jsonl"
        again = replay(str(LIFECYCLE), ledger_path=path)
        assert again.ledger.to_bytes() == lifecycle.ledger.to_bytes()
        assert path.read_bytes() == lifecycle.ledger.to_bytes()
        assert verify_file(path).ok

    def test_ledger_holds_no_secrets_or_directions(self, lifecycle):
        data = lifecycle.ledger.to_bytes()
        for cred in lifecycle._credentials:
            assert cred.secret.hex().encode() not in data
            assert cred.commitment.hex().encode() not in data
        votes = lifecycle.ledger.query({"kind": "GovernanceEvent", "proposal_id": "P-0001"})
        cast = [e.body for e in votes if e.body["event"] == "VoteCast"]
        assert len(cast) == 40
        assert all("direction" not in body for body in cast)

    def test_validation_records_registry_root(self, lifecycle):
        passed = [
            e.body for e in lifecycle.ledger.entries[1:] if e.body.get("event") == "ValidationPassed"
        ]
        assert len(passed) == 1
        assert len(passed[0]["registry_root"]) == 64

    def test_reconstruction_matches_live_state(self, lifecycle):
        rebuilt = reconstructed_states(lifecycle.ledger.entries)
        assert state_mismatches(lifecycle.states(), rebuilt) == []


class TestScenarioParsing:
    def test_blank_lines_are_skipped(self):
        actions = parse_scenario(["", line(0, "Register", count=3), "   "])
        assert len(actions) == 1
        assert actions[0].line == 2

    @pytest.mark.parametrize(
        "bad, number",
        [
            (["not json"], 1),
            ([line(0, "Register"), "[1, 2]"], 2),
            ([line(0, "Register"), line(-5, "Register")], 2),
            ([line(0, "Register"), line(1, "Teleport")], 2),
            ([line(10, "Register"), line(5, "Register")], 2),
            ([json.dumps({"t": 0, "event": "Register", "payload": [1]})], 1),
        ],
    )
    def test_parse_errors_carry_line_number(self, bad, number):
        with pytest.raises(ParseError) as info:
            parse_scenario(bad)
        assert info.value.detail == number

    def test_withdrawal_only(self):
        actions = parse_scenario(
            [
                line(0, "Register", count=5),
                line(1, "Submit", "P-0001", draft=DRAFT),
                line(2, "ProposerWithdrawal", "P-0001"),
            ]
        )
        instance = replay(actions)
        assert instance.states()["P-0001"]["state"] == "Rejected"
        assert len(instance.ledger) == 3

    def test_empty_scenario_writes_header_only(self):
        instance = replay([])
        assert len(instance.ledger) == 1
        assert instance.ledger[0].kind.value == "Header"

    def test_illegal_event_reports_line(self):
        actions = parse_scenario(
            [
                line(0, "Register", count=5),
                line(1, "Submit", "P-0001", draft=DRAFT),
                line(2, "ProposerWithdrawal", "P-0001"),
                line(3, "ProposerWithdrawal", "P-0001"),
            ]
        )
        with pytest.raises(IllegalTransition) as info:
            replay(actions)
        assert info.value.line == 4

    def test_bad_payload_is_a_parse_error(self):
        actions = parse_scenario([line(0, "Register", count=5), line(1, "CastVote", "P-0001")])
        with pytest.raises(ParseError) as info:
            replay(actions)
        assert info.value.detail == 2


class TestRejectedEvents:
    def test_oversized_tally_leaves_ledger_and_state_untouched(self):
        actions = parse_scenario(
            [
                line(0, "Register", count=10),
                line(1, "Submit", "P-0001", draft=DRAFT),
                line(2, "DeliberationExpired", "P-0001"),
                line(3, "ValidationPassed", "P-0001"),
            ]
        )
        instance = replay(actions)
        entries = len(instance.ledger)
        closing = parse_scenario([line(4, "VoteClosed", "P-0001", tally={"for": 50})])[0]
        with pytest.raises(TallyMismatch) as info:
            apply_action(instance, closing)
        assert info.value.line == 1
        assert len(instance.ledger) == entries
        assert instance.states()["P-0001"]["state"] == "Voting"
        assert instance.decisions == []


class TestLegitimacyReport:
    def test_report_row(self, lifecycle, tmp_path):
        path = tmp_path / "report.csv"
        rows = legitimacy_report(lifecycle, str(path))
        assert len(rows) == 1
        row = rows[0]
        assert row["proposal"] == "P-0001"
        assert row["R"] == pytest.approx(0.4)
        assert row["approval"] == pytest.approx(21 / 40)
        assert row["delib"] == pytest.approx(0.75)
        assert row["legitimacy"] == pytest.approx((0.4 + 0.525 + 0.75) / 3)
        assert row["running_mean"] == row["legitimacy"]
        with open(path, newline="") as f:
            assert next(csv.reader(f)) == REPORT_FIELDS

    def test_no_decisions(self):
        with pytest.raises(NoDecisions):
            legitimacy_report(replay([]))


class TestRandomScenarios:
    @pytest.mark.parametrize("seed", range(20))
    def test_ledger_alone_reconstructs_states(self, seed):
        actions = parse_scenario(scenario_lines(random_scenario(seed)))
        instance = replay(actions, create_config("sandbox", seed=seed))
        assert verify_chain(instance.ledger.to_bytes()).ok
        rebuilt = reconstruct_from_ledger(instance.ledger.entries)
        assert set(rebuilt) == set(instance.proposals)
        assert state_mismatches(instance.states(), reconstructed_states(instance.ledger.entries)) == []

    def test_generation_is_deterministic(self):
        assert scenario_lines(random_scenario(3)) == scenario_lines(random_scenario(3))
