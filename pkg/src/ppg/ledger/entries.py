"""
Ledger entry types and the kind-specific body records.

A body is always a plain dict so that it canonicalizes directly; the
dataclasses below only build and validate those dicts.
"""

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Tuple

from ..errors import ComponentOutOfRange, LedgerFormatError
from ..utils.canonical import canonical_bytes

GENESIS_PREV_HASH = bytes(32)


class EntryKind(str, Enum):
    GOVERNANCE_EVENT = "GovernanceEvent"
    FINANCIAL_TX = "FinancialTx"
    REDACTED_TX = "RedactedTx"
    CORRECTION = "Correction"
    HEADER = "Header"
    WARNING = "Warning"


@dataclass(frozen=True)
class FinancialTx:
    """One public financial flow. No minimum amount applies."""

    amount: float
    payer_body: str
    payee_label: str
    category: str
    budget_line: Optional[str] = None
    executed_at: Optional[int] = None

    def __post_init__(self):
        if self.amount < 0:
            raise ComponentOutOfRange("transaction amount must be >= 0", detail=self.amount)

    @property
    def authorised(self) -> bool:
        return bool(self.budget_line)

    def to_body(self) -> Dict[str, Any]:
        return {
            "amount": self.amount,
            "payer_body": self.payer_body,
            "payee_label": self.payee_label,
            "category": self.category,
            "budget_line": self.budget_line,
            "authorised": self.authorised,
            "flagged": not self.authorised,
            "executed_at": self.executed_at,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FinancialTx":
        return cls(
            amount=data["amount"],
            payer_body=str(data["payer_body"]),
            payee_label=str(data["payee_label"]),
            category=str(data["category"]),
            budget_line=data.get("budget_line"),
            executed_at=data.get("executed_at"),
        )


@dataclass(frozen=True)
class RedactedTx:
    """A withheld transaction. The redaction itself stays public."""

    category: str
    responsible_department: str
    legal_exemption: str
    withheld_fields: Tuple[str, ...] = ("amount", "payee_label")
    executed_at: Optional[int] = None

    def __post_init__(self):
        for name in ("category", "responsible_department", "legal_exemption"):
            if not getattr(self, name):
                raise LedgerFormatError(f"redacted entry needs '{name}'", detail=name)

    def to_body(self) -> Dict[str, Any]:
        return {
            "category": self.category,
            "responsible_department": self.responsible_department,
            "legal_exemption": self.legal_exemption,
            "withheld_fields": list(self.withheld_fields),
            "executed_at": self.executed_at,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RedactedTx":
        return cls(
            category=str(data.get("category", "")),
            responsible_department=str(data.get("responsible_department", "")),
            legal_exemption=str(data.get("legal_exemption", "")),
            withheld_fields=tuple(data.get("withheld_fields", ("amount", "payee_label"))),
            executed_at=data.get("executed_at"),
        )


@dataclass(frozen=True)
class LedgerEntry:
    index: int
    prev_hash: bytes
    timestamp: int
    kind: EntryKind
    body: Dict[str, Any] = field(default_factory=dict)
    entry_hash: bytes = b""
    signature: bytes = b""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "prev_hash": self.prev_hash.hex(),
            "timestamp": self.timestamp,
            "kind": self.kind.value,
            "body": self.body,
            "entry_hash": self.entry_hash.hex(),
            "signature": self.signature.hex(),
        }

    def to_line(self) -> bytes:
        """Canonical JSON form without the trailing newline."""
        return canonical_bytes(self.to_dict())

    @property
    def proposal_id(self) -> Optional[str]:
        return self.body.get("proposal_id")


def compute_entry_hash(
    prev_hash: bytes, index: int, timestamp: int, kind: EntryKind, body: Mapping[str, Any]
) -> bytes:
    """SHA-256(prev_hash || canonical(index, timestamp, kind, body))."""
    payload = canonical_bytes(
        {"index": index, "timestamp": timestamp, "kind": EntryKind(kind).value, "body": body}
    )
    return hashlib.sha256(prev_hash + payload).digest()


def strict_hex(value: Any, length: Optional[int] = None) -> Optional[bytes]:
    """Decode lowercase hex only; anything else returns None."""
    if not isinstance(value, str) or value != value.lower():
        return None
    try:
        raw = bytes.fromhex(value)
    except ValueError:
        return None
    if raw.hex() != value or (length is not None and len(raw) != length):
        return None
    return raw


def entry_from_dict(data: Mapping[str, Any]) -> LedgerEntry:
    """Rebuild an entry from its decoded line.

    Raises:
        LedgerFormatError: If a field is missing or has the wrong shape
    """
    try:
        prev_hash = strict_hex(data["prev_hash"], 32)
        entry_hash = strict_hex(data["entry_hash"], 32)
        signature = strict_hex(data["signature"])
        index = data["index"]
        timestamp = data["timestamp"]
        kind = EntryKind(data["kind"])
        body = data["body"]
    except (KeyError, ValueError, TypeError) as e:
        raise LedgerFormatError(f"malformed ledger entry: {e}") from e
    if prev_hash is None or entry_hash is None or signature is None:
        raise LedgerFormatError("hash fields must be lowercase hex")
    if not isinstance(index, int) or isinstance(index, bool):
        raise LedgerFormatError("index must be an integer", detail=index)
    if not isinstance(timestamp, int) or isinstance(timestamp, bool):
        raise LedgerFormatError("timestamp must be an integer", detail=timestamp)
    if not isinstance(body, dict):
        raise LedgerFormatError("body must be an object")
    return LedgerEntry(
        index=index,
        prev_hash=prev_hash,
        timestamp=timestamp,
        kind=kind,
        body=body,
        entry_hash=entry_hash,
        signature=signature,
    )

