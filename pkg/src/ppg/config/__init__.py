"""Configuration factory for PPG governance instances - multi-environment support."""

from .base import PPGSettings
from .production import ProductionConfig
from .sandbox import SandboxConfig


def create_config(environment: str = "sandbox", **kwargs) -> PPGSettings:
    """Factory function to create environment-appropriate configuration.

    Args:
        environment: 'sandbox' or 'production'
        **kwargs: Additional configuration options that override defaults

    Returns:
        An instance of the appropriate configuration class
    """
    if environment == "sandbox":
        return SandboxConfig(**kwargs)
    elif environment == "production":
        return ProductionConfig(**kwargs)
    else:
        return PPGSettings(environment=environment, **kwargs)


def load_settings(config_source: str = None, environment: str = None) -> PPGSettings:
    """Load a file or the environment, then re-create it under its profile."""
    loaded = PPGSettings.from_config(config_source)
    env = environment or loaded.environment
    fields = {k: v for k, v in loaded.__dict__.items() if k not in ("is_sandbox", "environment")}
    return create_config(env, **fields)


__all__ = ["PPGSettings", "SandboxConfig", "ProductionConfig", "create_config", "load_settings"]
