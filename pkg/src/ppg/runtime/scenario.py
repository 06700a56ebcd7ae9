"""
Scenario scripts: parsing, deterministic replay, and random generation.

A scenario is line-delimited JSON, one action per line:

    {"t": 0, "event": "Register", "proposal": null, "payload": {"count": 100}}

Actions are either transition-table event names, applied through the
engine, or runtime actions (Register, Sweep, Submit, Validate, CastVote(s),
RegisterVeto(es), Archive, FinancialTx, RedactedTx, Correction).
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Union

import numpy as np

from ..config import PPGSettings
from ..core import EventKind, ProposalDraft, VoteDirection
from ..errors import PPGError, ParseError
from ..ledger import FinancialTx, RedactedTx
from ..metrics import DelibArchive, QuorumParams, dynamic_quorum, impact_score, pass_decision, veto_decision
from ..metrics import VoteTally
from ..utils.canonical import canonical_bytes
from ..utils.file_ops import setup_logging
from .instance import GovernanceInstance, create_instance

logger = setup_logging(__name__)

EVENT_NAMES = frozenset(kind.value for kind in EventKind)


@dataclass(frozen=True)
class ScenarioAction:
    line: int
    t: int
    event: str
    proposal: Optional[str]
    payload: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {"t": self.t, "event": self.event, "proposal": self.proposal, "payload": self.payload}


def parse_scenario(lines: Iterable[Union[str, bytes]]) -> List[ScenarioAction]:
    """Parse and order-check scenario lines. Blank lines are skipped.

    Raises:
        ParseError: With the 1-based line number as detail
    """
    actions: List[ScenarioAction] = []
    last_t: Optional[int] = None
    for number, raw in enumerate(lines, start=1):
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        if not text.strip():
            continue
        try:
            record = json.loads(text)
        except ValueError as e:
            raise ParseError(f"line {number}: not JSON ({e})", detail=number) from e
        if not isinstance(record, dict):
            raise ParseError(f"line {number}: expected an object", detail=number)
        t = record.get("t")
        event = record.get("event")
        payload = record.get("payload") or {}
        if not isinstance(t, int) or isinstance(t, bool) or t < 0:
            raise ParseError(f"line {number}: 't' must be a non-negative integer", detail=number)
        if event not in EVENT_NAMES and event not in _RUNTIME_ACTIONS:
            raise ParseError(f"line {number}: unknown event {event!r}", detail=number)
        if not isinstance(payload, dict):
            raise ParseError(f"line {number}: payload must be an object", detail=number)
        if last_t is not None and t < last_t:
            raise ParseError(f"line {number}: events out of time order", detail=number)
        last_t = t
        proposal = record.get("proposal")
        actions.append(
            ScenarioAction(
                line=number,
                t=t,
                event=event,
                proposal=str(proposal) if proposal is not None else None,
                payload=payload,
            )
        )
    return actions


def load_scenario(path: Union[str, Path]) -> List[ScenarioAction]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return parse_scenario(f.read().splitlines())
    except OSError as e:
        raise ParseError(f"cannot read scenario {path}: {e}", detail=0) from e


def _draft(instance: GovernanceInstance, data: Mapping[str, Any]) -> ProposalDraft:
    data = dict(data)
    inputs = data.get("impact_inputs")
    if isinstance(inputs, dict) and "weights" not in inputs:
        data["impact_inputs"] = {**inputs, "weights": list(instance.settings.impact_weights)}
    return ProposalDraft.from_dict(data)


def _register(instance, action):
    instance.register_citizens(int(action.payload.get("count", 1)), action.t)


def _sweep(instance, action):
    instance.sweep(action.t)


def _submit(instance, action):
    draft = _draft(instance, action.payload.get("draft", action.payload))
    instance.submit(draft, action.t, action.proposal)


def _validate(instance, action):
    instance.validate(action.proposal, action.t)


def _cast_vote(instance, action):
    direction = VoteDirection(action.payload.get("direction", VoteDirection.FOR.value))
    instance.cast_vote(action.proposal, int(action.payload["voter"]), direction, action.t)


def _cast_votes(instance, action):
    instance.cast_votes(
        action.proposal,
        action.t,
        votes_for=int(action.payload.get("for", 0)),
        votes_against=int(action.payload.get("against", 0)),
        votes_blank=int(action.payload.get("blank", 0)),
    )


def _register_veto(instance, action):
    instance.register_veto(action.proposal, int(action.payload["voter"]), action.t)


def _register_vetoes(instance, action):
    instance.register_vetoes(action.proposal, action.t, int(action.payload.get("count", 1)))


def _archive(instance, action):
    ref = action.payload.get("archive_ref") or action.proposal
    instance.attach_archive(ref, DelibArchive.from_dict(action.payload.get("archive", {})))


def _financial(instance, action):
    payload = dict(action.payload)
    context = {"proposal_id": action.proposal} if action.proposal else {}
    instance.record_financial(FinancialTx.from_dict(payload), action.t, **context)


def _redacted(instance, action):
    context = {"proposal_id": action.proposal} if action.proposal else {}
    instance.record_redacted(RedactedTx.from_dict(action.payload), action.t, **context)


def _correction(instance, action):
    instance.record_correction(
        int(action.payload["references"]), action.payload.get("body", {}), action.t
    )


_RUNTIME_ACTIONS: Dict[str, Callable[[GovernanceInstance, ScenarioAction], None]] = {
    "Register": _register,
    "Sweep": _sweep,
    "Submit": _submit,
    "Validate": _validate,
    "CastVote": _cast_vote,
    "CastVotes": _cast_votes,
    "RegisterVeto": _register_veto,
    "RegisterVetoes": _register_vetoes,
    "Archive": _archive,
    "FinancialTx": _financial,
    "RedactedTx": _redacted,
    "Correction": _correction,
}


def apply_action(instance: GovernanceInstance, action: ScenarioAction) -> None:
    """Apply one action; errors are re-raised with the scenario line number."""
    try:
        handler = _RUNTIME_ACTIONS.get(action.event)
        if handler is not None:
            handler(instance, action)
        else:
            if action.proposal is None:
                raise ParseError(f"line {action.line}: {action.event} needs a proposal", detail=action.line)
            instance.apply_event(action.proposal, EventKind(action.event), action.t, action.payload)
    except ParseError:
        raise
    except PPGError as e:
        error = type(e)(f"line {action.line}: {e.args[0]}", detail=action.line)
        error.line = action.line
        raise error from e
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"line {action.line}: bad payload for {action.event} ({e})", detail=action.line) from e


def replay(
    actions: Union[List[ScenarioAction], str, Path],
    settings: Optional[PPGSettings] = None,
    ledger_path: Optional[Union[str, Path]] = None,
) -> GovernanceInstance:
    """Run a scenario on a fresh instance and return the final instance.

    Output is a pure function of the scenario bytes and the settings: the
    sandbox profile derives every secret and the signing key from the seed.
    """
    if not isinstance(actions, list):
        actions = load_scenario(actions)
    instance = create_instance(settings, str(ledger_path) if ledger_path else None)
    for action in actions:
        apply_action(instance, action)
    logger.info(
        f"Replayed {len(actions)} actions: {len(instance.proposals)} proposals, "
        f"{len(instance.ledger)} ledger entries"
    )
    return instance


def scenario_lines(actions: Iterable[Mapping[str, Any]]) -> List[bytes]:
    """Canonical JSON lines for a list of action dicts."""
    return [canonical_bytes(dict(a)) for a in actions]


def sample_draft(rng: np.random.Generator, index: int) -> Dict[str, Any]:
    return {
        "problem_statement": f"Problem {index}",
        "proposed_action": f"Action {index}",
        "impact_scope": "district",
        "stakeholders": "residents",
        "resources": "municipal budget",
        "impact_inputs": {
            "financial_magnitude": int(rng.integers(0, 200_000)),
            "budget_baseline": 100_000,
            "population_affected": int(rng.integers(0, 1000)),
            "eligible_population": 1000,
            "reversibility": str(rng.choice(["Low", "Medium", "High"])),
        },
        "archive_ref": None,
    }


def _veto_count_needed(eligible: int, q_veto: float) -> int:
    n = max(0, math.floor(q_veto * eligible) - 1)
    while not veto_decision(n, eligible, q_veto):
        n += 1
    return n


def random_scenario(
    seed: int,
    citizens: int = 60,
    proposals: int = 3,
    quorum_params: Optional[QuorumParams] = None,
) -> List[Dict[str, Any]]:
    """A legal random scenario for fuzzing replays.

    Outcomes are predicted with the same metrics the engine uses, so the
    generated script never triggers an illegal transition under
    ``quorum_params`` (default parameters if omitted) and the default
    approval denominator.
    """
    rng = np.random.default_rng(seed)
    qp = quorum_params or QuorumParams()
    actions: List[Dict[str, Any]] = [
        {"t": 0, "event": "Register", "proposal": None, "payload": {"count": citizens}}
    ]
    t = 0

    def emit(event: str, proposal: Optional[str], payload: Optional[Dict[str, Any]] = None, step: int = 10):
        nonlocal t
        t += step
        actions.append({"t": t, "event": event, "proposal": proposal, "payload": payload or {}})

    for k in range(1, proposals + 1):
        pid = f"P-{k:04d}"
        draft = sample_draft(rng, k)
        emit("Submit", pid, {"draft": draft})
        if rng.random() < 0.3:
            emit("FinancialTx", pid, {
                "amount": int(rng.integers(0, 50_000)),
                "payer_body": "treasury",
                "payee_label": f"vendor-{k}",
                "category": "services",
                "budget_line": None if rng.random() < 0.5 else f"BL-{k}",
                "executed_at": t,
            })
        for cycle in range(3):
            if rng.random() < 0.15:
                emit("ProposerWithdrawal", pid)
                break
            emit("DeliberationExpired", pid)
            if rng.random() < 0.15:
                emit("ValidationFailed", pid, {"reason": "conflicts with charter"})
                break
            emit("ValidationPassed", pid)
            counts = rng.multinomial(int(rng.integers(0, citizens + 1)), [0.55, 0.35, 0.10])
            tally = VoteTally(int(counts[0]), int(counts[1]), int(counts[2]))
            if tally.total:
                emit("CastVotes", pid, {"for": tally.votes_for, "against": tally.votes_against, "blank": tally.votes_blank})
            emit("VoteClosed", pid)
            sigma = impact_score(ProposalDraft.from_dict(draft).impact_inputs)
            outcome = pass_decision(tally, citizens, dynamic_quorum(qp, sigma))
            if not outcome.passed:
                break
            closed_at = t
            needed = _veto_count_needed(citizens, qp.q_veto)
            if rng.random() < 0.5:
                below = int(rng.integers(0, needed))
                if below:
                    emit("RegisterVetoes", pid, {"count": below}, step=1)
                t = max(t, closed_at + qp.tau) - 10
                emit("VetoWindowExpired", pid)
                break
            emit("RegisterVetoes", pid, {"count": needed}, step=1)
            draft = sample_draft(rng, k * 10 + cycle + 1)
            emit("RevisedResubmission", pid, {"draft": draft})
    return actions
