"""Behavioural archetypes of the participation model."""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Mapping, Tuple

from ..errors import InvalidSimConfig


class ArchetypeName(str, Enum):
    PASSIVE = "Passive"
    ACTIVE = "Active"
    STRATEGIC = "Strategic"


@dataclass(frozen=True)
class ArchetypeParams:
    """Participation behaviour of one archetype.

    ``drift_cap`` bounds the drifted base rate before noise is added.
    """

    name: ArchetypeName
    base_rate: float
    drift_per_round: float = 0.0
    drift_cap: float = 1.0
    noise_sd: float = 0.03
    approval_bias: float = 0.55

    def __post_init__(self):
        for field_name in ("base_rate", "approval_bias", "drift_cap"):
            value = getattr(self, field_name)
            if not 0.0 <= value <= 1.0:
                raise InvalidSimConfig(f"{self.name.value} {field_name} must lie in [0, 1]", detail=value)
        if self.noise_sd < 0:
            raise InvalidSimConfig(f"{self.name.value} noise_sd must be >= 0", detail=self.noise_sd)

    def drifted_rate(self, round_index: int) -> float:
        rate = self.base_rate + self.drift_per_round * round_index
        if self.drift_per_round > 0:
            return min(rate, max(self.drift_cap, self.base_rate))
        return max(rate, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name.value,
            "base_rate": self.base_rate,
            "drift_per_round": self.drift_per_round,
            "drift_cap": self.drift_cap,
            "noise_sd": self.noise_sd,
            "approval_bias": self.approval_bias,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ArchetypeParams":
        return cls(
            name=ArchetypeName(data["name"]),
            base_rate=float(data["base_rate"]),
            drift_per_round=float(data.get("drift_per_round", 0.0)),
            drift_cap=float(data.get("drift_cap", 1.0)),
            noise_sd=float(data.get("noise_sd", 0.03)),
            approval_bias=float(data.get("approval_bias", 0.55)),
        )


def default_archetypes() -> Tuple[ArchetypeParams, ArchetypeParams, ArchetypeParams]:
    """Passive / Active / Strategic with base rates 0.14 / 0.34 / 0.52.

    Passive participation drifts up by 0.0005 per round, capped at 0.3.
    """
    return (
        ArchetypeParams(ArchetypeName.PASSIVE, 0.14, drift_per_round=0.0005, drift_cap=0.3),
        ArchetypeParams(ArchetypeName.ACTIVE, 0.34),
        ArchetypeParams(ArchetypeName.STRATEGIC, 0.52),
    )


DEFAULT_POPULATION = (500, 350, 150)
