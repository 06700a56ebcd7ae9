"""
Configuration management for a PPG governance instance.
Handles quorum and legitimacy parameters, ledger settings and environment
configuration.

This module provides a dataclass-based configuration system that supports
loading settings from the canonical JSON config file, a YAML profile, or
environment variables.
"""

import json
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import yaml
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from dotenv import load_dotenv

from ..errors import ConfigurationError, MetricsError
from ..identity.registry import os_secret_source
from ..ledger.signing import generate_signing_key, load_signing_key
from ..metrics import ApprovalDenominator, LegitimacyWeights, QuorumParams
from ..metrics.impact import check_weights
from ..utils.file_ops import setup_logging

logger = setup_logging(__name__)

DAY = 24 * 3600


@dataclass
class PPGSettings:
    """Configuration settings for a governance instance.

    The quorum, weight and denominator fields mirror the canonical JSON
    config file; the remaining fields control the ledger, identity layer
    and output.
    """

    q_base: float = 0.2
    alpha: float = 0.3
    q_veto: float = 0.3
    tau_seconds: int = 14 * DAY
    impact_weights: Tuple[float, ...] = (1 / 3, 1 / 3, 1 / 3)
    legitimacy_w: Tuple[float, ...] = (1 / 3, 1 / 3, 1 / 3)
    legitimacy_a: Tuple[float, ...] = (0.25, 0.25, 0.25, 0.25)
    approval_denominator: str = ApprovalDenominator.ALL_CAST.value
    vacuous_coverage: bool = True
    publication_bound_seconds: int = DAY
    credential_lifetime_seconds: int = 3 * 365 * DAY
    seed: int = 0
    environment: str = "sandbox"
    output_directory: str = "data"
    log_level: str = "INFO"
    signing_key_path: Optional[str] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.impact_weights = tuple(float(w) for w in self.impact_weights)
        self.legitimacy_w = tuple(float(w) for w in self.legitimacy_w)
        self.legitimacy_a = tuple(float(a) for a in self.legitimacy_a)
        self.is_sandbox = self.environment == "sandbox"

    # Loaders

    @classmethod
    def _from_mapping(cls, data: Mapping[str, Any], **overrides: Any) -> "PPGSettings":
        weights = data.get("legitimacy_weights") or {}
        kwargs: Dict[str, Any] = {
            "q_base": data.get("q_base", 0.2),
            "alpha": data.get("alpha", 0.3),
            "q_veto": data.get("q_veto", 0.3),
            "tau_seconds": data.get("tau_seconds", 14 * DAY),
            "impact_weights": tuple(data.get("impact_weights", (1 / 3, 1 / 3, 1 / 3))),
            "legitimacy_w": tuple(weights.get("w", (1 / 3, 1 / 3, 1 / 3))),
            "legitimacy_a": tuple(weights.get("a", (0.25, 0.25, 0.25, 0.25))),
            "approval_denominator": data.get("approval_denominator", "all_cast"),
        }
        for key in (
            "vacuous_coverage",
            "publication_bound_seconds",
            "credential_lifetime_seconds",
            "seed",
            "environment",
            "output_directory",
            "log_level",
            "signing_key_path",
        ):
            if key in data:
                kwargs[key] = data[key]
        known = set(kwargs) | {"legitimacy_weights"}
        kwargs["extra"] = {k: v for k, v in data.items() if k not in known}
        kwargs.update(overrides)
        return cls(**kwargs)

    @classmethod
    def from_json(cls, filepath: str) -> "PPGSettings":
        """Create settings from the canonical JSON config file.

        JSON structure:
            {"q_base": 0.2, "alpha": 0.3, "q_veto": 0.3, "tau_seconds": 1209600,
             "impact_weights": [...], "legitimacy_weights": {"w": [...], "a": [...]},
             "approval_denominator": "all_cast"}

        Raises:
            ConfigurationError: If the file cannot be read or parsed
        """
        try:
            with open(filepath, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            raise ConfigurationError(f"Error loading JSON configuration: {e}", detail=filepath) from e
        if not isinstance(data, dict):
            raise ConfigurationError("JSON configuration must be an object", detail=filepath)
        return cls._from_mapping(data)

    @classmethod
    def from_yaml(cls, filepath: str) -> "PPGSettings":
        """Create settings from a YAML profile.

        YAML structure:
            ppg:
              environment: "sandbox"
              q_base: 0.2
              alpha: 0.3
              legitimacy_weights:
                w: [0.3333, 0.3333, 0.3334]
              seed: 42
              signing_key_path: null

        Raises:
            ConfigurationError: If the file cannot be read or parsed
        """
        try:
            with open(filepath, "r", encoding="utf-8") as f:
                config_data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"Error loading YAML configuration: {e}", detail=filepath) from e
        section = config_data.get("ppg", {}) if isinstance(config_data, dict) else None
        if not isinstance(section, dict):
            raise ConfigurationError("YAML configuration needs a 'ppg' mapping", detail=filepath)
        return cls._from_mapping(section)

    @classmethod
    def from_environment(cls) -> "PPGSettings":
        """Create settings from environment variables (and a ``.env`` file).

        Environment variables:
            PPG_ENVIRONMENT: sandbox or production (default: sandbox)
            PPG_Q_BASE, PPG_ALPHA, PPG_Q_VETO: quorum parameters
            PPG_TAU_SECONDS: veto window length
            PPG_APPROVAL_DENOMINATOR: all_cast or directed_only
            PPG_PUBLICATION_BOUND: ledger publication bound in seconds
            PPG_SEED: seed for sandbox secrets and keys
            PPG_OUTPUT_DIR: output directory (default: data)
            PPG_LOG_LEVEL: logging level (default: INFO)
            PPG_SIGNING_KEY: path to a PEM Ed25519 key

        Raises:
            ConfigurationError: If a numeric variable does not parse
        """
        load_dotenv()
        try:
            return cls(
                q_base=float(os.getenv("PPG_Q_BASE", "0.2")),
                alpha=float(os.getenv("PPG_ALPHA", "0.3")),
                q_veto=float(os.getenv("PPG_Q_VETO", "0.3")),
                tau_seconds=int(os.getenv("PPG_TAU_SECONDS", str(14 * DAY))),
                approval_denominator=os.getenv("PPG_APPROVAL_DENOMINATOR", "all_cast"),
                publication_bound_seconds=int(os.getenv("PPG_PUBLICATION_BOUND", str(DAY))),
                seed=int(os.getenv("PPG_SEED", "0")),
                environment=os.getenv("PPG_ENVIRONMENT", "sandbox"),
                output_directory=os.getenv("PPG_OUTPUT_DIR", "data"),
                log_level=os.getenv("PPG_LOG_LEVEL", "INFO"),
                signing_key_path=os.getenv("PPG_SIGNING_KEY"),
            )
        except ValueError as e:
            raise ConfigurationError(f"Invalid PPG_* environment value: {e}") from e

    @classmethod
    def from_config(cls, config_source: Optional[str] = None) -> "PPGSettings":
        """Create settings from a JSON or YAML file, falling back to the environment."""
        if config_source and os.path.exists(config_source):
            if config_source.endswith((".yaml", ".yml")):
                return cls.from_yaml(config_source)
            if config_source.endswith(".json"):
                return cls.from_json(config_source)
        elif config_source:
            logger.warning(f"Config file {config_source} not found; using environment")
        return cls.from_environment()

    # Derived objects

    def quorum_params(self) -> QuorumParams:
        return QuorumParams(
            q_base=self.q_base, alpha=self.alpha, q_veto=self.q_veto, tau=self.tau_seconds
        )

    def legitimacy_weights(self) -> LegitimacyWeights:
        return LegitimacyWeights(w=tuple(self.legitimacy_w), a=tuple(self.legitimacy_a))

    def denominator(self) -> ApprovalDenominator:
        return ApprovalDenominator(self.approval_denominator)

    def secret_source(self) -> Callable[[], bytes]:
        return os_secret_source

    def signing_key(self) -> Ed25519PrivateKey:
        if self.signing_key_path:
            return load_signing_key(self.signing_key_path)
        return generate_signing_key()

    def validate(self) -> List[str]:
        """Check the settings; returns the list of problems (empty when valid)."""
        problems: List[str] = []
        try:
            self.quorum_params()
        except MetricsError as e:
            problems.append(str(e))
        for weights, size, name in (
            (self.impact_weights, 3, "impact_weights"),
            (self.legitimacy_w, 3, "legitimacy_weights.w"),
            (self.legitimacy_a, 4, "legitimacy_weights.a"),
        ):
            try:
                check_weights(tuple(weights), size, name)
            except MetricsError as e:
                problems.append(str(e))
        if self.q_veto <= self.q_base:
            logger.warning(
                f"q_veto={self.q_veto} does not exceed q_base={self.q_base}; "
                f"a small bloc can veto what a quorum approved"
            )
        if self.approval_denominator not in {d.value for d in ApprovalDenominator}:
            problems.append(f"unknown approval_denominator '{self.approval_denominator}'")
        if self.publication_bound_seconds < 0:
            problems.append("publication_bound_seconds must be non-negative")
        if self.credential_lifetime_seconds <= 0:
            problems.append("credential_lifetime_seconds must be positive")
        return problems

    def to_dict(self) -> Dict[str, Any]:
        """The canonical JSON config view of these settings."""
        return {
            "q_base": self.q_base,
            "alpha": self.alpha,
            "q_veto": self.q_veto,
            "tau_seconds": self.tau_seconds,
            "impact_weights": list(self.impact_weights),
            "legitimacy_weights": {"w": list(self.legitimacy_w), "a": list(self.legitimacy_a)},
            "approval_denominator": self.approval_denominator,
            "vacuous_coverage": self.vacuous_coverage,
            "publication_bound_seconds": self.publication_bound_seconds,
            "credential_lifetime_seconds": self.credential_lifetime_seconds,
        }

    def get_environment_info(self) -> Dict[str, Any]:
        return {
            "environment": self.environment,
            "is_sandbox": self.is_sandbox,
            "seed": self.seed if self.is_sandbox else None,
            "output_directory": self.output_directory,
            "signing_key_path": self.signing_key_path,
        }
