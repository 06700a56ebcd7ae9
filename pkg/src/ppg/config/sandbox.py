"""
Sandbox configuration for PPG governance instances.
Everything random is derived from the seed so replays are byte-identical.
"""

from typing import Callable

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

from ..identity.registry import seeded_secret_source
from ..ledger.signing import derive_signing_key, load_signing_key
from .base import PPGSettings


class SandboxConfig(PPGSettings):
    """Deterministic profile for tests, demos and scenario replays.

    Credential secrets and the ledger key are derived from ``seed``; anyone
    who knows the seed can recompute them.
    """

    def __init__(self, **kwargs):
        """Initialize sandbox configuration with default values.

        Args:
            **kwargs: Configuration values that override defaults
        """
        kwargs.setdefault("environment", "sandbox")
        kwargs.setdefault("seed", 0)
        kwargs.setdefault("log_level", "INFO")
        super().__init__(**kwargs)

    def secret_source(self) -> Callable[[], bytes]:
        return seeded_secret_source(self.seed)

    def signing_key(self) -> Ed25519PrivateKey:
        if self.signing_key_path:
            return load_signing_key(self.signing_key_path)
        return derive_signing_key(self.seed)
