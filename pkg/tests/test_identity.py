"""Tests for the eligibility registry and participation nullifiers."""

import pytest

from ppg.errors import (
    AttestationRejected,
    DuplicateCommitment,
    EmptyRegistry,
    NotEligible,
    NullifierAlreadyConsumed,
)
from ppg.identity import (
    EligibilityRegistry,
    Scope,
    derive_commitment,
    derive_nullifier,
    seeded_secret_source,
)

DAY = 24 * 3600


@pytest.fixture
def citizens(registry):
    return [registry.register(b"passport", now=0) for _ in range(50)]


class TestRegistration:
    def test_register_stores_commitment_only(self, registry):
        cred = registry.register(b"passport", now=0)
        exported = registry.export_registry()
        assert cred.commitment.hex().encode() in exported
        assert cred.secret.hex().encode() not in exported
        assert cred.commitment == derive_commitment(cred.secret)

    def test_secret_not_in_repr(self, registry):
        cred = registry.register(b"passport")
        assert cred.secret.hex() not in repr(cred)

    def test_attestation_rejected(self):
        registry = EligibilityRegistry(verifier=lambda evidence: evidence == b"valid")
        with pytest.raises(AttestationRejected):
            registry.register(b"forged")

    def test_duplicate_commitment(self):
        registry = EligibilityRegistry(secret_source=lambda: b"\x01" * 32)
        registry.register(b"passport")
        with pytest.raises(DuplicateCommitment):
            registry.register(b"passport")

    def test_export_is_sorted_and_deterministic(self):
        a = EligibilityRegistry(secret_source=seeded_secret_source(9))
        b = EligibilityRegistry(secret_source=seeded_secret_source(9))
        for registry in (a, b):
            for _ in range(5):
                registry.register(b"passport")
        assert a.export_registry() == b.export_registry()
        assert a.registry_root() == b.registry_root()
        rows = a.export_records()
        assert [r["commitment"] for r in rows] == sorted(r["commitment"] for r in rows)


class TestSnapshots:
    def test_empty_registry(self, registry):
        with pytest.raises(EmptyRegistry):
            registry.snapshot("P-0001#0")

    def test_snapshot_is_frozen(self, registry, citizens):
        snap = registry.snapshot("P-0001#0")
        registry.register(b"passport")
        assert registry.snapshot("P-0001#0") == snap
        assert snap.eligible == 50
        assert registry.snapshot("P-0002#0").eligible == 51

    def test_late_registration_not_eligible(self, registry, citizens):
        registry.snapshot("P-0001#0")
        newcomer = registry.register(b"passport")
        with pytest.raises(NotEligible):
            registry.prove_participation(newcomer, "P-0001#0", Scope.VOTE)

    def test_sweep_removes_expired_and_revoked(self):
        registry = EligibilityRegistry(secret_source=seeded_secret_source(1), credential_lifetime=10 * DAY)
        old = registry.register(b"passport", now=0)
        registry.register(b"passport", now=5 * DAY)
        revoked = registry.register(b"passport", now=5 * DAY)
        registry.revoke(revoked.commitment_hex)
        assert registry.revalidation_sweep(now=12 * DAY) == 2
        assert registry.live_count == 1
        snap = registry.snapshot("P-0001#0")
        assert snap.eligible == 1
        with pytest.raises(NotEligible):
            registry.prove_participation(old, "P-0001#0", Scope.VOTE)

    def test_snapshot_excludes_expired_without_sweep(self):
        registry = EligibilityRegistry(secret_source=seeded_secret_source(1), credential_lifetime=DAY)
        registry.register(b"passport", now=0)
        registry.register(b"passport", now=2 * DAY)
        assert registry.snapshot("P-0001#0", now=2 * DAY + 1).eligible == 1

    def test_revoke_unknown(self, registry):
        with pytest.raises(NotEligible):
            registry.revoke("00" * 32)


class TestNullifiers:
    def test_double_participation_rejected(self, registry, citizens):
        registry.snapshot("P-0001#0")
        for cred in citizens:
            registry.prove_participation(cred, "P-0001#0", Scope.VOTE)
            with pytest.raises(NullifierAlreadyConsumed):
                registry.prove_participation(cred, "P-0001#0", Scope.VOTE)
        assert registry.consumed_count("P-0001#0", Scope.VOTE) == 50

    def test_scopes_and_decisions_are_independent(self, registry, citizens):
        registry.snapshot("P-0001#0")
        registry.snapshot("P-0001#1")
        cred = citizens[0]
        vote = registry.prove_participation(cred, "P-0001#0", Scope.VOTE)
        veto = registry.prove_participation(cred, "P-0001#0", Scope.VETO)
        next_cycle = registry.prove_participation(cred, "P-0001#1", Scope.VOTE)
        assert len({vote.nullifier, veto.nullifier, next_cycle.nullifier}) == 3

    def test_no_snapshot_means_not_eligible(self, registry, citizens):
        with pytest.raises(NotEligible):
            registry.prove_participation(citizens[0], "P-0009#0", Scope.VOTE)

    def test_public_outputs_do_not_link(self, registry, citizens):
        registry.snapshot("P-0001#0")
        nullifiers = [
            registry.prove_participation(c, "P-0001#0", Scope.VOTE).nullifier for c in citizens
        ]
        exported = registry.export_registry().decode()
        commitments = {c.commitment.hex() for c in citizens}
        for cred, nullifier in zip(citizens, nullifiers):
            assert cred.secret.hex() not in exported
            assert nullifier not in exported
            assert nullifier not in commitments
            # the nullifier is not the commitment hash re-tagged
            assert nullifier != derive_nullifier(cred.commitment, "P-0001#0", Scope.VOTE).hex()
            assert nullifier == derive_nullifier(cred.secret, "P-0001#0", Scope.VOTE).hex()
