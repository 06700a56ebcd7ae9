"""
Repeated-game collusion containment: the critical discount factor beta*.

Payoff stream: a colluding faction of size f pays the per-round net loss
L = C(f) - G(f, Q) for ``capture_horizon`` rounds, then collects
``capture_gain`` every round after. Defection pays 0 forever. beta* is the
discount factor at which the two streams are worth the same:

    g_c * beta^T - L * (1 - beta^T) = 0
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import optimize

from ..errors import DomainViolation, EmptyQList, PreconditionViolation
from ..utils.file_ops import setup_logging
from .deterrence import GameParams, cost, gain, solve_critical_faction

logger = setup_logging(__name__)


class CollusionOutcome(str, Enum):
    UNSUSTAINABLE = "Unsustainable"


@dataclass(frozen=True)
class CollusionParams:
    capture_horizon: int = 10
    capture_gain: Optional[float] = None
    beta_grid: float = 1e-3
    sigma_bar: float = 0.5

    def __post_init__(self):
        if self.capture_horizon < 1:
            raise DomainViolation("capture horizon must be at least one round", detail=self.capture_horizon)
        if not 0 < self.beta_grid < 1:
            raise DomainViolation("beta grid resolution must lie in (0, 1)", detail=self.beta_grid)
        if not 0 <= self.sigma_bar <= 1:
            raise DomainViolation("mean impact must lie in [0, 1]", detail=self.sigma_bar)

    def gain_per_round(self, p: GameParams) -> float:
        return p.g_max if self.capture_gain is None else self.capture_gain


BetaStar = Union[float, CollusionOutcome]


def collusion_loss(q_base: float, alpha: float, f: float, cp: CollusionParams, p: GameParams) -> float:
    """Per-round net loss L at the collusion quorum Q = q_base + alpha * sigma_bar.

    Raises:
        PreconditionViolation: If f is not in (0, f*(Q)) or C(f) <= G(f, Q)
    """
    quorum = q_base + alpha * cp.sigma_bar
    if not 0 < quorum < 1:
        raise DomainViolation("collusion quorum must lie in (0, 1)", detail=quorum)
    if f <= 0:
        raise PreconditionViolation("faction size must be positive", detail=f)
    f_star = solve_critical_faction(quorum, p).f_star
    if f >= f_star:
        raise PreconditionViolation(
            "faction is not below the critical size; collusion analysis does not apply",
            detail=(f, f_star),
        )
    loss = cost(f, p) - gain(f, quorum, p)
    if loss <= 0:
        raise PreconditionViolation(
            "manipulation already pays at this faction size; no loss stream to sustain",
            detail=(f, loss),
        )
    return loss


def beta_star_closed_form(loss: float, capture_gain: float, horizon: int) -> BetaStar:
    if capture_gain <= 0:
        return CollusionOutcome.UNSUSTAINABLE
    return float((loss / (loss + capture_gain)) ** (1.0 / horizon))


def beta_star(
    q_base: float,
    alpha: float,
    f: float,
    cp: CollusionParams,
    p: GameParams,
) -> BetaStar:
    """Minimum discount factor sustaining collusion, found by bisection.

    Returns:
        beta* in (0, 1), or CollusionOutcome.UNSUSTAINABLE when no discount
        factor makes the stream worth entering

    Raises:
        PreconditionViolation: If f is not in (0, f*(q_base + alpha * sigma_bar))
    """
    loss = collusion_loss(q_base, alpha, f, cp, p)
    g_c = cp.gain_per_round(p)
    if g_c <= 0:
        return CollusionOutcome.UNSUSTAINABLE

    horizon = cp.capture_horizon

    def indifference(beta: float) -> float:
        bt = beta**horizon
        return g_c * bt - loss * (1.0 - bt)

    # Coarse bracket on the beta grid, then bisection inside it.
    betas = np.linspace(0.0, 1.0, int(round(1.0 / cp.beta_grid)) + 1)
    bt = betas**horizon
    values = g_c * bt - loss * (1.0 - bt)
    positive = np.flatnonzero(values > 0.0)
    if positive.size == 0:
        return CollusionOutcome.UNSUSTAINABLE
    hi_idx = int(positive[0])
    lo, hi = float(betas[max(hi_idx - 1, 0)]), float(betas[hi_idx])
    if indifference(lo) == 0.0:
        return lo
    root = float(optimize.bisect(indifference, lo, hi, xtol=p.tolerance))
    logger.debug(f"beta*(q_base={q_base}, alpha={alpha}, f={f}) = {root:.9f}")
    return root


def collusion_grid(
    q_bases: Sequence[float],
    alphas: Sequence[float],
    f: float,
    cp: CollusionParams,
    p: GameParams,
) -> List[Dict[str, Any]]:
    """Tabulate beta* over (q_base, alpha)."""
    if not q_bases or not alphas:
        raise EmptyQList("collusion grid needs q_base and alpha values")
    rows = []
    for q_base in q_bases:
        for alpha in alphas:
            result = beta_star(float(q_base), float(alpha), f, cp, p)
            rows.append(
                {
                    "q_base": float(q_base),
                    "alpha": float(alpha),
                    "f": f,
                    "beta_star": result.value if isinstance(result, CollusionOutcome) else result,
                }
            )
    logger.info(f"Collusion grid: {len(rows)} cells at f={f}")
    return rows
