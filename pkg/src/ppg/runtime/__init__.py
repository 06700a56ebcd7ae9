"""Runnable governance instances, scenario replay and reporting."""

from .instance import DecisionRecord, GovernanceInstance, create_instance, proposal_state
from .report import (
    REPORT_FIELDS,
    legitimacy_report,
    reconstruct_from_ledger,
    reconstructed_states,
    state_mismatches,
)
from .scenario import (
    ScenarioAction,
    apply_action,
    load_scenario,
    parse_scenario,
    random_scenario,
    replay,
    scenario_lines,
)

__all__ = [
    "REPORT_FIELDS",
    "DecisionRecord",
    "GovernanceInstance",
    "ScenarioAction",
    "apply_action",
    "create_instance",
    "legitimacy_report",
    "load_scenario",
    "parse_scenario",
    "proposal_state",
    "random_scenario",
    "reconstruct_from_ledger",
    "reconstructed_states",
    "replay",
    "scenario_lines",
    "state_mismatches",
]
