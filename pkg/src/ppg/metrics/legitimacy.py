"""
Deliberation quality and composite legitimacy.

Both scores are convex combinations of components in [0, 1], so they stay
within [0, 1] and between their smallest and largest component.
"""

import math
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Tuple

from ..errors import ComponentOutOfRange
from .impact import check_weights, clamp


@dataclass(frozen=True)
class Argument:
    """One archived deliberation contribution.

    ``position_tag`` is None for contributions that take no position
    (procedural objections, questions); they still count for inclusion.
    """

    position_tag: Optional[str]
    stakeholder_group: str
    type: str = "factual"


@dataclass(frozen=True)
class DelibArchive:
    arguments: Tuple[Argument, ...] = ()
    expert_assessments: Tuple[str, ...] = ()  # impact domains covered
    impact_domains_identified: FrozenSet[str] = frozenset()
    revision_count: int = 0
    stakeholder_groups_recognised: FrozenSet[str] = frozenset()
    max_positions: int = 1
    max_revisions: int = 1

    def __post_init__(self):
        if self.revision_count < 0:
            raise ComponentOutOfRange("revision_count must be non-negative")
        if self.max_positions <= 0 or self.max_revisions <= 0:
            raise ComponentOutOfRange(
                "category maxima must be positive",
                detail=(self.max_positions, self.max_revisions),
            )

    @classmethod
    def from_dict(cls, data: dict) -> "DelibArchive":
        maxima = data.get("category_maxima", {})
        return cls(
            arguments=tuple(
                Argument(
                    position_tag=a.get("position_tag"),
                    stakeholder_group=a["stakeholder_group"],
                    type=a.get("type", "factual"),
                )
                for a in data.get("arguments", [])
            ),
            expert_assessments=tuple(
                e["impact_domain"] for e in data.get("expert_assessments", [])
            ),
            impact_domains_identified=frozenset(data.get("impact_domains_identified", [])),
            revision_count=int(data.get("revision_count", 0)),
            stakeholder_groups_recognised=frozenset(
                data.get("stakeholder_groups_recognised", [])
            ),
            max_positions=int(maxima.get("max_positions", 1)),
            max_revisions=int(maxima.get("max_revisions", 1)),
        )


@dataclass(frozen=True)
class LegitimacyWeights:
    """``w`` weighs (participation, approval, deliberation); ``a`` weighs
    (diversity, expert coverage, depth, inclusion)."""

    w: Tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    a: Tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)

    def validate(self) -> None:
        check_weights(tuple(self.w), 3, "legitimacy weights w")
        check_weights(tuple(self.a), 4, "deliberation weights a")

    @classmethod
    def from_dict(cls, data: dict) -> "LegitimacyWeights":
        default = cls()
        return cls(
            w=tuple(data.get("w", default.w)),
            a=tuple(data.get("a", default.a)),
        )


def delib_components(
    archive: DelibArchive, vacuous_coverage: bool = True
) -> Tuple[float, float, float, float]:
    """(A, E, D, I): diversity, expert coverage, depth, inclusion."""
    positions = {a.position_tag for a in archive.arguments if a.position_tag}
    diversity = clamp(len(positions) / archive.max_positions)

    identified = archive.impact_domains_identified
    if identified:
        assessed = identified.intersection(archive.expert_assessments)
        coverage = len(assessed) / len(identified)
    else:
        coverage = 1.0 if vacuous_coverage else 0.0

    depth = clamp(archive.revision_count / archive.max_revisions)

    recognised = archive.stakeholder_groups_recognised
    if recognised:
        contributing = recognised.intersection(a.stakeholder_group for a in archive.arguments)
        inclusion = len(contributing) / len(recognised)
    else:
        inclusion = 1.0 if vacuous_coverage else 0.0

    return diversity, coverage, depth, inclusion


def delib_quality(
    archive: DelibArchive, weights: LegitimacyWeights, vacuous_coverage: bool = True
) -> float:
    """Structured deliberation quality, a1*A + a2*E + a3*D + a4*I."""
    check_weights(tuple(weights.a), 4, "deliberation weights a")
    components = delib_components(archive, vacuous_coverage)
    return clamp(math.fsum(a * c for a, c in zip(weights.a, components)))


def legitimacy(R: float, approval: float, delib: float, weights: LegitimacyWeights) -> float:
    """L(d) = w1*R + w2*approval + w3*delib.

    Raises:
        ComponentOutOfRange: If a component is outside [0, 1]
        WeightSumViolation: If ``weights.w`` is not a probability vector
    """
    components: List[float] = [R, approval, delib]
    for name, value in zip(("R", "approval", "delib"), components):
        if math.isnan(value) or not 0.0 <= value <= 1.0:
            raise ComponentOutOfRange(f"{name} must lie in [0, 1]", detail=value)
    check_weights(tuple(weights.w), 3, "legitimacy weights w")
    return clamp(math.fsum(w * c for w, c in zip(weights.w, components)))
