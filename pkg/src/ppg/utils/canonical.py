"""
Canonical JSON encoding shared by the ledger, the identity registry export
and the config hash.

Encoding is RFC 8785 (sorted keys, no whitespace, UTF-8, shortest floats).
Bytes must be hex-encoded by the caller before they reach this module.
"""

import hashlib
from enum import Enum
from typing import Any

import rfc8785

from ..errors import SerializationFailure

_PASSTHROUGH_TYPES = (bool, int, float, str, type(None))


def _normalize(value: Any) -> Any:
    """Recursively convert tuples, sets and enums into JSON primitives."""
    if isinstance(value, Enum):
        return _normalize(value.value)

    if isinstance(value, _PASSTHROUGH_TYPES):
        return value

    if isinstance(value, dict):
        return {str(k): _normalize(v) for k, v in value.items()}

    if isinstance(value, (list, tuple)):
        return [_normalize(item) for item in value]

    if isinstance(value, (set, frozenset)):
        return sorted(_normalize(item) for item in value)

    if isinstance(value, (bytes, bytearray)):
        raise SerializationFailure(
            "Cannot serialize bytes to canonical JSON; hex-encode first",
            detail=f"{bytes(value)[:16]!r}",
        )

    raise SerializationFailure(
        f"Cannot serialize type {type(value).__name__} to canonical JSON"
    )


def canonical_bytes(value: Any) -> bytes:
    """Serialize a value to its RFC 8785 canonical byte form.

    Raises:
        SerializationFailure: If the value holds a type JSON cannot express
            or a number outside the canonical domain.
    """
    try:
        return rfc8785.dumps(_normalize(value))
    except SerializationFailure:
        raise
    except (rfc8785.CanonicalizationError, TypeError, ValueError) as e:
        raise SerializationFailure(f"Canonicalization failed: {e}") from e


def canonical_hash(value: Any) -> str:
    """SHA-256 of the canonical bytes, lowercase hex."""
    return hashlib.sha256(canonical_bytes(value)).hexdigest()
