"""Shared fixtures for the PPG test suite."""

import pytest

from ppg.config import create_config
from ppg.core import ProposalDraft
from ppg.identity import EligibilityRegistry, seeded_secret_source
from ppg.ledger import Ledger, derive_signing_key
from ppg.metrics import ImpactInputs, Reversibility
from ppg.runtime import create_instance


def make_draft(
    financial: float = 0.0,
    population: int = 0,
    reversibility: str = "Low",
    archive_ref=None,
    **overrides,
) -> ProposalDraft:
    fields = dict(
        problem_statement="Potholes on Elm Street",
        proposed_action="Resurface Elm Street",
        impact_scope="Elm Street",
        stakeholders="Residents, cyclists",
        resources="Road maintenance budget",
    )
    fields.update(overrides)
    return ProposalDraft(
        **fields,
        impact_inputs=ImpactInputs(
            financial_magnitude=financial,
            budget_baseline=100_000,
            population_affected=population,
            eligible_population=1000,
            reversibility=Reversibility(reversibility),
        ),
        archive_ref=archive_ref,
    )


@pytest.fixture
def draft() -> ProposalDraft:
    return make_draft()


@pytest.fixture
def settings():
    return create_config("sandbox", seed=7)


@pytest.fixture
def signing_key():
    return derive_signing_key(11)


@pytest.fixture
def ledger(signing_key):
    return Ledger(key=signing_key)


@pytest.fixture
def registry():
    return EligibilityRegistry(secret_source=seeded_secret_source(3))


@pytest.fixture
def instance(settings):
    return create_instance(settings)
