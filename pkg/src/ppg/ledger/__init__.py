"""Hash-chained, signed, append-only public ledger."""

from .chain import (
    DEFAULT_PUBLICATION_BOUND,
    Ledger,
    VerifyResult,
    VerifyStatus,
    ledger_stats,
    query,
    split_lines,
    verify_chain,
    verify_file,
)
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
    derive_signing_key,
    generate_signing_key,
    load_signing_key,
    public_key_hex,
    save_signing_key,
)

__all__ = [
    "DEFAULT_PUBLICATION_BOUND",
    "GENESIS_PREV_HASH",
    "SCHEME_ID",
    "EntryKind",
    "FinancialTx",
    "Ledger",
    "LedgerEntry",
    "RedactedTx",
    "VerifyResult",
    "VerifyStatus",
    "compute_entry_hash",
    "derive_signing_key",
    "entry_from_dict",
    "generate_signing_key",
    "ledger_stats",
    "load_signing_key",
    "public_key_hex",
    "query",
    "save_signing_key",
    "split_lines",
    "verify_chain",
    "verify_file",
]
