"""Ed25519 key handling for the ledger."""

import hashlib
from pathlib import Path
from typing import Optional, Union

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from ..errors import ConfigurationError, SigningFailure

SCHEME_ID = "ed25519"
KEY_TAG = b"PPG-LEDGER-KEY\x00"

PublicKeyLike = Union[Ed25519PublicKey, bytes, str]


def derive_signing_key(seed: int) -> Ed25519PrivateKey:
    """Deterministic key for sandbox replays. Anyone knowing the seed can sign."""
    material = hashlib.sha256(KEY_TAG + seed.to_bytes(8, "big", signed=True)).digest()
    return Ed25519PrivateKey.from_private_bytes(material)


def generate_signing_key() -> Ed25519PrivateKey:
    return Ed25519PrivateKey.generate()


def load_signing_key(path: Union[str, Path], password: Optional[bytes] = None) -> Ed25519PrivateKey:
    """Load a PEM-encoded Ed25519 private key.

    Raises:
        ConfigurationError: If the file is missing or does not hold an Ed25519 key
    """
    try:
        pem_bytes = Path(path).read_bytes()
        key = serialization.load_pem_private_key(pem_bytes, password=password)
    except (OSError, ValueError, TypeError) as e:
        raise ConfigurationError(f"Cannot load ledger signing key: {e}", detail=str(path)) from e
    if not isinstance(key, Ed25519PrivateKey):
        raise ConfigurationError("Ledger signing key is not Ed25519", detail=str(path))
    return key


def save_signing_key(key: Ed25519PrivateKey, path: Union[str, Path]) -> None:
    pem = key.private_bytes(
        encoding=serialization.Encoding.PEM,
        format=serialization.PrivateFormat.PKCS8,
        encryption_algorithm=serialization.NoEncryption(),
    )
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(pem)


def public_key_hex(key: Union[Ed25519PrivateKey, Ed25519PublicKey]) -> str:
    public = key.public_key() if isinstance(key, Ed25519PrivateKey) else key
    return public.public_bytes(
        encoding=serialization.Encoding.Raw, format=serialization.PublicFormat.Raw
    ).hex()


def as_public_key(value: PublicKeyLike) -> Ed25519PublicKey:
    """Accept a key object, 32 raw bytes, or their lowercase hex form."""
    if isinstance(value, Ed25519PublicKey):
        return value
    raw = bytes.fromhex(value) if isinstance(value, str) else value
    return Ed25519PublicKey.from_public_bytes(raw)


def sign_digest(key: Ed25519PrivateKey, digest: bytes) -> bytes:
    """Detached signature over a 32-byte entry hash.

    Raises:
        SigningFailure: If the key cannot sign
    """
    if not isinstance(key, Ed25519PrivateKey):
        raise SigningFailure(f"unsupported signing key type {type(key).__name__}")
    try:
        return key.sign(digest)
    except Exception as e:
        raise SigningFailure(f"signing failed: {e}") from e


def verify_digest(public_key: Ed25519PublicKey, signature: bytes, digest: bytes) -> bool:
    try:
        public_key.verify(signature, digest)
    except InvalidSignature:
        return False
    return True
