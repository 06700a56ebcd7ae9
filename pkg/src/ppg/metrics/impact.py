"""
Impact scoring and the dynamic quorum.

A proposal's impact score is a weighted mix of three normalised inputs
(financial magnitude against the budget baseline, affected population
against the eligible population, reversibility class). The quorum a
proposal must reach grows linearly with that score.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from ..errors import (
    ComponentOutOfRange,
    NonPositiveBaseline,
    SigmaOutOfRange,
    WeightSumViolation,
)

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-9


class Reversibility(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"

    @property
    def score(self) -> float:
        """Equally spaced mapping of the three-level ordinal onto [0, 1]."""
        return _REVERSIBILITY_SCORES[self]


_REVERSIBILITY_SCORES = {
    Reversibility.LOW: 0.0,
    Reversibility.MEDIUM: 0.5,
    Reversibility.HIGH: 1.0,
}


def check_weights(weights: Tuple[float, ...], expected_len: int, name: str) -> None:
    """Raise WeightSumViolation unless ``weights`` is a probability vector."""
    if len(weights) != expected_len:
        raise WeightSumViolation(
            f"{name} must have {expected_len} components", detail=len(weights)
        )
    if any(w < 0 or math.isnan(w) for w in weights):
        raise WeightSumViolation(f"{name} must be non-negative", detail=list(weights))
    total = math.fsum(weights)
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        raise WeightSumViolation(f"{name} must sum to 1", detail=total)


def clamp(value: float, lo: float = 0.0, hi: float = 1.0) -> float:
    return max(lo, min(hi, value))


@dataclass(frozen=True)
class ImpactInputs:
    """Raw inputs of the impact score for one proposal."""

    financial_magnitude: float
    budget_baseline: float
    population_affected: int
    eligible_population: int
    reversibility: Reversibility
    weights: Tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def components(self) -> Tuple[float, float, float]:
        """Normalised (financial, population, reversibility) components."""
        if self.budget_baseline <= 0:
            raise NonPositiveBaseline(
                "budget_baseline must be positive", detail=self.budget_baseline
            )
        if self.eligible_population <= 0:
            raise NonPositiveBaseline(
                "eligible_population must be positive", detail=self.eligible_population
            )
        if self.financial_magnitude < 0 or self.population_affected < 0:
            raise ComponentOutOfRange("impact magnitudes must be non-negative")
        return (
            clamp(self.financial_magnitude / self.budget_baseline),
            clamp(self.population_affected / self.eligible_population),
            Reversibility(self.reversibility).score,
        )

    def to_dict(self) -> dict:
        return {
            "financial_magnitude": self.financial_magnitude,
            "budget_baseline": self.budget_baseline,
            "population_affected": self.population_affected,
            "eligible_population": self.eligible_population,
            "reversibility": Reversibility(self.reversibility).value,
            "weights": list(self.weights),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ImpactInputs":
        weights = data.get("weights")
        return cls(
            financial_magnitude=data["financial_magnitude"],
            budget_baseline=data["budget_baseline"],
            population_affected=data["population_affected"],
            eligible_population=data["eligible_population"],
            reversibility=Reversibility(data["reversibility"]),
            weights=tuple(weights) if weights is not None else (1 / 3, 1 / 3, 1 / 3),
        )


def impact_score(inputs: ImpactInputs) -> float:
    """Normalised impact score sigma in [0, 1].

    Raises:
        WeightSumViolation: If the weights are not a probability vector
        NonPositiveBaseline: If a normalising denominator is not positive
    """
    check_weights(tuple(inputs.weights), 3, "impact weights")
    components = inputs.components()
    sigma = math.fsum(w * c for w, c in zip(inputs.weights, components))
    return clamp(sigma)


@dataclass(frozen=True)
class QuorumParams:
    """Quorum parameters of a governance context.

    ``tau`` is the veto window length in seconds.
    """

    q_base: float = 0.2
    alpha: float = 0.3
    q_veto: float = 0.3
    tau: int = 14 * 24 * 3600

    def __post_init__(self):
        if not 0.0 < self.q_base < 1.0:
            raise ComponentOutOfRange("q_base must lie in (0, 1)", detail=self.q_base)
        if not 0.0 <= self.alpha <= 1.0:
            raise ComponentOutOfRange("alpha must lie in [0, 1]", detail=self.alpha)
        if self.q_base + self.alpha > 1.0 + WEIGHT_TOLERANCE:
            raise ComponentOutOfRange(
                "q_base + alpha must not exceed 1", detail=self.q_base + self.alpha
            )
        if not 0.0 < self.q_veto < 1.0:
            raise ComponentOutOfRange("q_veto must lie in (0, 1)", detail=self.q_veto)
        if self.tau < 0:
            raise ComponentOutOfRange("tau must be non-negative", detail=self.tau)
        if self.q_veto <= self.q_base:
            logger.warning(
                f"q_veto={self.q_veto} is not above q_base={self.q_base}; "
                "vetoes will be easier to trigger than passage"
            )


def dynamic_quorum(params: QuorumParams, sigma: float) -> float:
    """Q(i) = q_base + alpha * sigma, bounded by [q_base, q_base + alpha].

    Raises:
        SigmaOutOfRange: If sigma is outside [0, 1]
    """
    if math.isnan(sigma) or not 0.0 <= sigma <= 1.0:
        raise SigmaOutOfRange("impact score must lie in [0, 1]", detail=sigma)
    return params.q_base + params.alpha * sigma
