"""
Eligibility registry, credentials and participation nullifiers.

The registry stores only one-way commitments to credential secrets. A
citizen proves participation in a decision by presenting the credential to
the verifier, which checks membership privately and publishes nothing but a
per-(decision, scope) nullifier. Commitments and nullifiers use distinct
hash domains, so a published nullifier cannot be matched to a registry row.
"""

import hashlib
import secrets
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, Optional, Set, Tuple

from ..errors import (
    AttestationRejected,
    DuplicateCommitment,
    EmptyRegistry,
    NotEligible,
    NullifierAlreadyConsumed,
)
from ..utils.canonical import canonical_bytes
from ..utils.file_ops import setup_logging

logger = setup_logging(__name__)

COMMIT_TAG = b"PPG-COMMIT\x00"
NULL_TAG = b"PPG-NULL\x00"
SEED_TAG = b"PPG-SEED\x00"
SECRET_BYTES = 32

AttestationVerifier = Callable[[bytes], bool]
SecretSource = Callable[[], bytes]


class Scope(str, Enum):
    VOTE = "Vote"
    VETO = "Veto"


def derive_commitment(secret: bytes) -> bytes:
    """H(domain_tag_commit || secret)."""
    return hashlib.sha256(COMMIT_TAG + secret).digest()


def derive_nullifier(secret: bytes, decision_id: str, scope: Scope) -> bytes:
    """H(domain_tag_null || scope || decision_id || secret)."""
    return hashlib.sha256(
        NULL_TAG + Scope(scope).value.encode() + decision_id.encode() + secret
    ).digest()


def accept_any_attestation(attestation: bytes) -> bool:
    """Stand-in verifier: any non-empty evidence blob is accepted."""
    return bool(attestation)


def os_secret_source() -> bytes:
    return secrets.token_bytes(SECRET_BYTES)


def seeded_secret_source(seed: int) -> SecretSource:
    """Deterministic secret stream for reproducible replays.

    Never use outside the sandbox profile: anyone knowing the seed can
    recompute every secret.
    """
    counter = 0
    seed_bytes = seed.to_bytes(8, "big", signed=True)

    def next_secret() -> bytes:
        nonlocal counter
        counter += 1
        return hashlib.sha256(SEED_TAG + seed_bytes + counter.to_bytes(8, "big")).digest()

    return next_secret


@dataclass(frozen=True)
class Credential:
    """Private eligibility credential held by a citizen.

    The secret is excluded from repr so it cannot leak through logs.
    """

    secret: bytes = field(repr=False)
    commitment: bytes
    issued_at: int
    expires_at: int

    @property
    def commitment_hex(self) -> str:
        return self.commitment.hex()


@dataclass(frozen=True)
class VerifiedParticipation:
    """Public proof output: a fresh nullifier and the decision it is scoped to."""

    nullifier: str
    decision_id: str
    scope: Scope


@dataclass(frozen=True)
class EligibilitySnapshot:
    decision_id: str
    eligible: int
    registry_root: str

    @property
    def P(self) -> int:
        return self.eligible


@dataclass
class _RegistryRecord:
    expires_at: int
    live: bool = True
    revoked: bool = False


class EligibilityRegistry:
    """Hashed eligibility registry with a trusted participation verifier.

    Registry mutations and nullifier check-and-insert are serialized through
    one lock; snapshots are immutable once taken.
    """

    def __init__(
        self,
        verifier: AttestationVerifier = accept_any_attestation,
        secret_source: SecretSource = os_secret_source,
        credential_lifetime: int = 3 * 365 * 24 * 3600,
    ):
        """Initialize the registry.

        Args:
            verifier: Predicate deciding whether an attestation is accepted
            secret_source: Callable returning a fresh 32-byte secret
            credential_lifetime: Seconds a credential stays valid after issue
        """
        self.verifier = verifier
        self.secret_source = secret_source
        self.credential_lifetime = credential_lifetime
        self._records: Dict[str, _RegistryRecord] = {}
        self._snapshots: Dict[str, Tuple[EligibilitySnapshot, FrozenSet[str]]] = {}
        self._consumed: Dict[Tuple[str, Scope], Set[str]] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    @property
    def live_count(self) -> int:
        return sum(1 for r in self._records.values() if r.live)

    def register(self, attestation: bytes, now: int = 0) -> Credential:
        """Issue a credential for an accepted attestation.

        Raises:
            AttestationRejected: If the verifier predicate refuses the evidence
            DuplicateCommitment: If the new commitment already exists
        """
        if not self.verifier(attestation):
            raise AttestationRejected("attestation refused by verifier")
        secret = self.secret_source()
        commitment = derive_commitment(secret)
        key = commitment.hex()
        with self._lock:
            if key in self._records:
                raise DuplicateCommitment(
                    "commitment collision; secret source is not producing fresh values"
                )
            expires_at = now + self.credential_lifetime
            self._records[key] = _RegistryRecord(expires_at=expires_at)
        logger.debug(f"Registered credential, registry size {len(self._records)}")
        return Credential(secret=secret, commitment=commitment, issued_at=now, expires_at=expires_at)

    def revoke(self, commitment_hex: str) -> None:
        """Flag a commitment for removal at the next revalidation sweep."""
        with self._lock:
            record = self._records.get(commitment_hex)
            if record is None:
                raise NotEligible("unknown commitment")
            record.revoked = True

    def revalidation_sweep(self, now: int) -> int:
        """Mark expired or revoked commitments dead.

        Existing snapshots are untouched.

        Returns:
            Number of commitments newly marked dead
        """
        removed = 0
        with self._lock:
            for record in self._records.values():
                if record.live and (record.revoked or record.expires_at < now):
                    record.live = False
                    removed += 1
        logger.info(f"Revalidation sweep at t={now}: {removed} removed, {self.live_count} live")
        return removed

    def export_records(self) -> list:
        return [
            {
                "commitment": key,
                "expires_at": record.expires_at,
                "status": "live" if record.live else "dead",
            }
            for key, record in sorted(self._records.items())
        ]

    def export_registry(self) -> bytes:
        """Canonical JSON array of registry rows sorted by commitment."""
        return canonical_bytes(self.export_records())

    def registry_root(self) -> str:
        return hashlib.sha256(self.export_registry()).hexdigest()

    def snapshot(self, decision_id: str, now: Optional[int] = None) -> EligibilitySnapshot:
        """Freeze the eligible population for a decision.

        A second call for the same decision returns the frozen snapshot.
        When ``now`` is given, credentials already past expiry are excluded
        even if no sweep has run yet.

        Raises:
            EmptyRegistry: If no live commitment exists
        """
        with self._lock:
            if decision_id in self._snapshots:
                return self._snapshots[decision_id][0]
            members = frozenset(
                key
                for key, record in self._records.items()
                if record.live and (now is None or record.expires_at >= now)
            )
            if not members:
                raise EmptyRegistry("no live commitments to snapshot", detail=decision_id)
            root = hashlib.sha256(canonical_bytes(self.export_records())).hexdigest()
            snap = EligibilitySnapshot(
                decision_id=decision_id, eligible=len(members), registry_root=root
            )
            self._snapshots[decision_id] = (snap, members)
        logger.info(f"Snapshot for {decision_id}: P={snap.eligible}")
        return snap

    def get_snapshot(self, decision_id: str) -> Optional[EligibilitySnapshot]:
        entry = self._snapshots.get(decision_id)
        return entry[0] if entry else None

    def prove_participation(
        self, cred: Credential, decision_id: str, scope: Scope
    ) -> VerifiedParticipation:
        """Verify eligibility privately and consume the nullifier.

        Raises:
            NotEligible: If there is no snapshot for the decision or the
                credential's commitment is not a member of it
            NullifierAlreadyConsumed: If this credential already participated
                in the same decision and scope
        """
        scope = Scope(scope)
        entry = self._snapshots.get(decision_id)
        if entry is None:
            raise NotEligible("no eligibility snapshot for decision", detail=decision_id)
        if derive_commitment(cred.secret).hex() not in entry[1]:
            raise NotEligible("credential not eligible for decision", detail=decision_id)
        nullifier = derive_nullifier(cred.secret, decision_id, scope).hex()
        with self._lock:
            consumed = self._consumed.setdefault((decision_id, scope), set())
            if nullifier in consumed:
                raise NullifierAlreadyConsumed(
                    "nullifier already consumed", detail=(decision_id, scope.value)
                )
            consumed.add(nullifier)
        return VerifiedParticipation(nullifier=nullifier, decision_id=decision_id, scope=scope)

    def consumed_count(self, decision_id: str, scope: Scope) -> int:
        return len(self._consumed.get((decision_id, Scope(scope)), ()))
