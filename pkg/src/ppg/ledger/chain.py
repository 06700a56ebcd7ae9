"""
Hash-chained, signed, append-only public ledger.

Persistence is newline-delimited canonical JSON, one entry per line; the
``Ledger`` object is an in-memory index over those lines. Governance events
and financial flows share one chain, discriminated by ``kind``.
"""

import json
import threading
from collections import Counter, defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

from ..errors import (
    IndexOutOfRange,
    LedgerFileExists,
    LedgerFormatError,
    MalformedFilter,
    SerializationFailure,
)
from ..utils.canonical import canonical_bytes
from ..utils.file_ops import ensure_directory_exists, setup_logging
from .entries import (
    GENESIS_PREV_HASH,
    EntryKind,
    FinancialTx,
    LedgerEntry,
    RedactedTx,
    compute_entry_hash,
    entry_from_dict,
)
from .signing import (
    SCHEME_ID,
    PublicKeyLike,
    as_public_key,
    public_key_hex,
    sign_digest,
    verify_digest,
)

logger = setup_logging(__name__)

DEFAULT_PUBLICATION_BOUND = 24 * 3600
FILTER_KEYS = frozenset({"proposal_id", "from", "to", "kind", "budget_line"})


class VerifyStatus(str, Enum):
    OK = "Ok"
    BAD_HASH = "BadHashAt"
    BAD_SIGNATURE = "BadSignatureAt"
    BAD_LINK = "BadLinkAt"


@dataclass(frozen=True)
class VerifyResult:
    status: VerifyStatus
    index: Optional[int] = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status is VerifyStatus.OK

    def __str__(self) -> str:
        if self.ok:
            return self.status.value
        return f"{self.status.value}({self.index})"


class Ledger:
    """Single-writer append-only log.

    Appends are serialized through a lock. Readers see whole entries only,
    because an entry is published to the index after its line is written.
    """

    def __init__(
        self,
        key: Optional[Ed25519PrivateKey] = None,
        path: Optional[Union[str, Path]] = None,
        publication_bound: int = DEFAULT_PUBLICATION_BOUND,
    ):
        """Initialize an empty ledger.

        Args:
            key: Ed25519 signing key; required for appends
            path: File to append lines to; None keeps the ledger in memory
            publication_bound: Max seconds between execution and recording

        Raises:
            LedgerFileExists: If ``path`` already holds entries; use
                ``Ledger.load(path, attach=True)`` to continue that chain
        """
        self.key = key
        self.path = Path(path) if path is not None else None
        self.publication_bound = publication_bound
        self._entries: List[LedgerEntry] = []
        self._lines: List[bytes] = []
        self._lock = threading.Lock()

        if self.path is not None:
            ensure_directory_exists(str(self.path.parent))
            if self.path.exists() and self.path.stat().st_size > 0:
                raise LedgerFileExists(
                    f"{self.path} already holds a ledger; load it to continue the chain",
                    detail=str(self.path),
                )
            self.path.write_bytes(b"")

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(list(self._entries))

    def __getitem__(self, index: int) -> LedgerEntry:
        return self._entries[index]

    @property
    def entries(self) -> List[LedgerEntry]:
        return list(self._entries)

    @property
    def lines(self) -> List[bytes]:
        return list(self._lines)

    @property
    def head(self) -> bytes:
        return self._entries[-1].entry_hash if self._entries else GENESIS_PREV_HASH

    def to_bytes(self) -> bytes:
        return b"".join(line + b"\n" for line in self._lines)

    def write(self, path: Union[str, Path]) -> Path:
        """Write the whole log to ``path`` and return it."""
        target = Path(path)
        ensure_directory_exists(str(target.parent))
        target.write_bytes(self.to_bytes())
        logger.info(f"Wrote {len(self)} ledger entries to {target}")
        return target

    @classmethod
    def load(
        cls,
        path: Union[str, Path],
        key: Optional[Ed25519PrivateKey] = None,
        publication_bound: int = DEFAULT_PUBLICATION_BOUND,
        attach: bool = False,
    ) -> "Ledger":
        """Re-index an existing ledger file. The chain is not verified here.

        Args:
            path: Ledger file
            key: Signing key for further appends
            publication_bound: Max seconds between execution and recording
            attach: Keep appending to ``path``

        Raises:
            LedgerFormatError: If a line is not a well-formed entry
        """
        source = Path(path)
        ledger = cls(key=key, publication_bound=publication_bound)
        for position, line in enumerate(split_lines(source.read_bytes())):
            try:
                entry = entry_from_dict(json.loads(line))
            except ValueError as e:
                raise LedgerFormatError(f"line {position + 1} is not JSON: {e}", detail=position) from e
            ledger._entries.append(entry)
            ledger._lines.append(line)
        if attach:
            ledger.path = source
        logger.info(f"Loaded {len(ledger)} ledger entries from {source}")
        return ledger

    def append(
        self,
        body: Mapping[str, Any],
        kind: Union[EntryKind, str],
        timestamp: int,
        key: Optional[Ed25519PrivateKey] = None,
        submitted_at: Optional[int] = None,
    ) -> LedgerEntry:
        """Append one signed entry.

        A financial body carrying ``executed_at`` is checked against the
        publication bound; an overrun appends a public Warning entry after it.

        Raises:
            SerializationFailure: If the body cannot be canonicalized
            SigningFailure: If no usable key is available
        """
        kind = EntryKind(kind)
        body = dict(body)
        if kind is EntryKind.FINANCIAL_TX:
            body["flagged"] = not body.get("budget_line")
            body["authorised"] = not body["flagged"]
            if submitted_at is None:
                submitted_at = body.get("executed_at")

        entry = self._append_one(body, kind, timestamp, key)

        if submitted_at is not None and timestamp - submitted_at > self.publication_bound:
            delay = timestamp - submitted_at
            logger.warning(
                f"Entry {entry.index} recorded {delay}s after submission "
                f"(bound {self.publication_bound}s)"
            )
            self._append_one(
                {
                    "references": entry.index,
                    "reason": "publication_delay",
                    "delay_seconds": delay,
                    "bound_seconds": self.publication_bound,
                },
                EntryKind.WARNING,
                timestamp,
                key,
            )
        return entry

    def _append_one(
        self,
        body: Dict[str, Any],
        kind: EntryKind,
        timestamp: int,
        key: Optional[Ed25519PrivateKey],
    ) -> LedgerEntry:
        signer = key if key is not None else self.key
        with self._lock:
            index = len(self._entries)
            prev_hash = self.head
            entry_hash = compute_entry_hash(prev_hash, index, timestamp, kind, body)
            signature = sign_digest(signer, entry_hash)
            entry = LedgerEntry(
                index=index,
                prev_hash=prev_hash,
                timestamp=timestamp,
                kind=kind,
                body=body,
                entry_hash=entry_hash,
                signature=signature,
            )
            line = entry.to_line()
            if self.path is not None:
                with open(self.path, "ab") as f:
                    f.write(line + b"\n")
            self._lines.append(line)
            self._entries.append(entry)
        logger.debug(f"Appended {kind.value} entry {index}")
        return entry

    def append_header(self, timestamp: int, **metadata: Any) -> LedgerEntry:
        """Write the genesis header naming the signature scheme and public key."""
        if self.key is None:
            raise SerializationFailure("a header needs the ledger signing key")
        body = {"scheme": SCHEME_ID, "public_key": public_key_hex(self.key)}
        body.update(metadata)
        return self.append(body, EntryKind.HEADER, timestamp)

    def append_financial(
        self, tx: FinancialTx, timestamp: int, **context: Any
    ) -> LedgerEntry:
        body = tx.to_body()
        body.update(context)
        return self.append(body, EntryKind.FINANCIAL_TX, timestamp)

    def append_redacted(
        self, tx: RedactedTx, timestamp: int, **context: Any
    ) -> LedgerEntry:
        body = tx.to_body()
        body.update(context)
        return self.append(
            body, EntryKind.REDACTED_TX, timestamp, submitted_at=tx.executed_at
        )

    def append_correction(
        self,
        original_index: int,
        corrected_body: Mapping[str, Any],
        timestamp: int,
        key: Optional[Ed25519PrivateKey] = None,
    ) -> LedgerEntry:
        """Record a correction as a new entry referencing the original.

        Raises:
            IndexOutOfRange: If ``original_index`` is not an existing entry
        """
        if not 0 <= original_index < len(self._entries):
            raise IndexOutOfRange(
                f"no entry {original_index} in a ledger of {len(self._entries)}",
                detail=original_index,
            )
        body = {
            "references": original_index,
            "corrected_kind": self._entries[original_index].kind.value,
            "corrected_body": dict(corrected_body),
        }
        return self.append(body, EntryKind.CORRECTION, timestamp, key=key)

    def query(self, criteria: Optional[Mapping[str, Any]] = None) -> List[LedgerEntry]:
        return query(self._entries, criteria)

    def verify(self, public_key: Optional[PublicKeyLike] = None) -> VerifyResult:
        if public_key is None and self.key is not None:
            public_key = self.key.public_key()
        return verify_chain(self._lines, public_key)

    def stats(self) -> Dict[str, Any]:
        return ledger_stats(self._entries)


def split_lines(data: bytes) -> List[bytes]:
    """Split file bytes into entry lines.

    A final line without its newline is kept so verification can report it.
    """
    if not data:
        return []
    lines = data.split(b"\n")
    if lines[-1] == b"":
        lines.pop()
    else:
        lines[-1] = lines[-1] + b"\x00"
    return lines


def _header_key(lines: Sequence[bytes]) -> Optional[PublicKeyLike]:
    try:
        first = json.loads(lines[0])
        if first.get("kind") == EntryKind.HEADER.value:
            return first["body"]["public_key"]
    except (ValueError, KeyError, TypeError, AttributeError, IndexError):
        pass
    return None


def verify_chain(
    log: Union[bytes, Sequence[bytes], "Ledger"],
    public_key: Optional[PublicKeyLike] = None,
) -> VerifyResult:
    """Check every entry's canonical form, link, hash and signature.

    Without an explicit key the public key is taken from the genesis header.
    Tampering is reported as a result value, never raised.

    Returns:
        Ok, or the first failure as BadHashAt / BadLinkAt / BadSignatureAt
    """
    if isinstance(log, Ledger):
        lines: Sequence[bytes] = log.lines
    elif isinstance(log, (bytes, bytearray)):
        lines = split_lines(bytes(log))
    else:
        lines = list(log)

    if public_key is None:
        public_key = _header_key(lines)
    try:
        verifier = as_public_key(public_key) if public_key is not None else None
    except ValueError:
        verifier = None

    expected_prev = GENESIS_PREV_HASH
    for position, line in enumerate(lines):
        try:
            entry = entry_from_dict(json.loads(line))
            if canonical_bytes(entry.to_dict()) != line:
                return VerifyResult(VerifyStatus.BAD_HASH, position, "line is not in canonical form")
        except (ValueError, LedgerFormatError, SerializationFailure) as e:
            return VerifyResult(VerifyStatus.BAD_HASH, position, f"unreadable entry: {e}")

        if entry.prev_hash != expected_prev or entry.index != position:
            return VerifyResult(VerifyStatus.BAD_LINK, position, "chain link broken")

        try:
            recomputed = compute_entry_hash(
                entry.prev_hash, entry.index, entry.timestamp, entry.kind, entry.body
            )
        except SerializationFailure as e:
            return VerifyResult(VerifyStatus.BAD_HASH, position, str(e))
        if recomputed != entry.entry_hash:
            return VerifyResult(VerifyStatus.BAD_HASH, position, "entry hash mismatch")

        if verifier is None or not verify_digest(verifier, entry.signature, entry.entry_hash):
            return VerifyResult(VerifyStatus.BAD_SIGNATURE, position, "signature does not verify")

        expected_prev = entry.entry_hash

    return VerifyResult(VerifyStatus.OK)


def verify_file(path: Union[str, Path], public_key: Optional[PublicKeyLike] = None) -> VerifyResult:
    result = verify_chain(Path(path).read_bytes(), public_key)
    if result.ok:
        logger.info(f"Ledger {path} verified")
    else:
        logger.warning(f"Ledger {path} failed verification: {result} {result.reason}")
    return result


def _check_filter(criteria: Mapping[str, Any]) -> Dict[str, Any]:
    unknown = set(criteria) - FILTER_KEYS
    if unknown:
        raise MalformedFilter(f"unknown filter keys {sorted(unknown)}")
    checked = {k: v for k, v in criteria.items() if v is not None}
    if "kind" in checked:
        try:
            checked["kind"] = EntryKind(checked["kind"])
        except ValueError as e:
            raise MalformedFilter(f"unknown entry kind {checked['kind']!r}") from e
    lo, hi = checked.get("from"), checked.get("to")
    for bound in (lo, hi):
        if bound is not None and (not isinstance(bound, int) or isinstance(bound, bool)):
            raise MalformedFilter("time bounds must be integers", detail=bound)
    if lo is not None and hi is not None and lo > hi:
        raise MalformedFilter("time range is inverted", detail=(lo, hi))
    return checked


def query(
    entries: Iterable[LedgerEntry], criteria: Optional[Mapping[str, Any]] = None
) -> List[LedgerEntry]:
    """Entries matching every given criterion, in index order.

    The time range is half-open: ``from <= timestamp < to``.

    Raises:
        MalformedFilter: On unknown keys, an unknown kind or an inverted range
    """
    checked = _check_filter(criteria or {})
    matches = []
    for entry in entries:
        if "kind" in checked and entry.kind is not checked["kind"]:
            continue
        if "proposal_id" in checked and entry.body.get("proposal_id") != checked["proposal_id"]:
            continue
        if "budget_line" in checked and entry.body.get("budget_line") != checked["budget_line"]:
            continue
        if "from" in checked and entry.timestamp < checked["from"]:
            continue
        if "to" in checked and entry.timestamp >= checked["to"]:
            continue
        matches.append(entry)
    return sorted(matches, key=lambda e: e.index)


def ledger_stats(entries: Sequence[LedgerEntry]) -> Dict[str, Any]:
    """Counts per kind, flagged spending, totals per budget line, chain head."""
    per_kind = Counter(e.kind.value for e in entries)
    per_line: Dict[str, float] = defaultdict(float)
    flagged = 0
    for entry in entries:
        if entry.kind is EntryKind.FINANCIAL_TX:
            if entry.body.get("flagged"):
                flagged += 1
            line = entry.body.get("budget_line") or "(unallocated)"
            per_line[line] += float(entry.body.get("amount", 0))
    return {
        "entries": len(entries),
        "per_kind": dict(sorted(per_kind.items())),
        "flagged_financial": flagged,
        "totals_per_budget_line": dict(sorted(per_line.items())),
        "warnings": per_kind.get(EntryKind.WARNING.value, 0),
        "head": entries[-1].entry_hash.hex() if entries else GENESIS_PREV_HASH.hex(),
    }
