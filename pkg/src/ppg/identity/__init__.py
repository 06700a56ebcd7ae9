"""Eligibility registry, credentials and per-decision participation nullifiers."""

from .registry import (
    COMMIT_TAG,
    NULL_TAG,
    Credential,
    EligibilityRegistry,
    EligibilitySnapshot,
    Scope,
    VerifiedParticipation,
    accept_any_attestation,
    derive_commitment,
    derive_nullifier,
    os_secret_source,
    seeded_secret_source,
)

__all__ = [
    "COMMIT_TAG",
    "NULL_TAG",
    "Credential",
    "EligibilityRegistry",
    "EligibilitySnapshot",
    "Scope",
    "VerifiedParticipation",
    "accept_any_attestation",
    "derive_commitment",
    "derive_nullifier",
    "os_secret_source",
    "seeded_secret_source",
]
