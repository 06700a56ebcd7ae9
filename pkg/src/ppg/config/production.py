"""
Production configuration for PPG governance instances.
Secrets come from the OS CSPRNG and the ledger key from a PEM file.
"""

from typing import List

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

from ..errors import ConfigurationError
from ..ledger.signing import load_signing_key
from .base import PPGSettings


class ProductionConfig(PPGSettings):
    """Production profile: a signing key file is mandatory."""

    def __init__(self, **kwargs):
        """Initialize production configuration with default values.

        Args:
            **kwargs: Configuration values that override defaults
        """
        kwargs.setdefault("environment", "production")
        kwargs.setdefault("log_level", "WARNING")
        super().__init__(**kwargs)

    def signing_key(self) -> Ed25519PrivateKey:
        if not self.signing_key_path:
            raise ConfigurationError("production ledgers need signing_key_path")
        return load_signing_key(self.signing_key_path)

    def validate(self) -> List[str]:
        problems = super().validate()
        if not self.signing_key_path:
            problems.append("signing_key_path is required in production")
        return problems
